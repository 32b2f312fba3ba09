"""Bundled certificate assets."""
