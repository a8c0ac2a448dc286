"""Utility helpers: seed splitting, direction-number table and output writers."""
