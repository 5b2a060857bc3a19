#!/usr/bin/env python3
"""
Main entry point for the cornerflm command line
"""

from cornerflm.main import main

if __name__ == "__main__":
    main()
