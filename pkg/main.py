"""
speiser-escape entry point
==========================
Runs the command-line interface from a source checkout.

Usage:
    python main.py selftest
    python main.py counting --config configs/counting_wp_power.conf
"""

import os

from dotenv import load_dotenv

# Load .env before the settings singleton is created on import
current_dir = os.path.dirname(os.path.abspath(__file__))
load_dotenv(os.path.join(current_dir, ".env"))

from speiser_escape.cli import app  # noqa: E402

if __name__ == "__main__":
    app()
