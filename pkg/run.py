#!/usr/bin/env python3
"""Meshnet — entry point."""

from src.core.app import run

if __name__ == "__main__":
    run()
