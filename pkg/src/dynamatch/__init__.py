"""Fully dynamic maximal matching."""
