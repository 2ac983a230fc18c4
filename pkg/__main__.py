"""Neckpinch Lab module entry point.

Allows running the laboratory as a module: python -m neckpinch-lab

Author: Odiseo Team
Created: 2025-10-31
Version: 1.0.0
"""

import sys

from app.main import main

if __name__ == "__main__":
    sys.exit(main())
