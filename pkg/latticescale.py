#!/usr/bin/env python3
"""Command-line entry point: python latticescale.py <command> [options]."""

from src.cli.app import app

if __name__ == "__main__":
    app()
