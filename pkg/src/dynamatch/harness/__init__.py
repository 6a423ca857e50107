"""Stream generation, runners, oracles and CLI."""
