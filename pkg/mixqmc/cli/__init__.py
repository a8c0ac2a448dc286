"""Command line package initialization."""
