"""Module entry point: python -m returnspec ..."""

from .cli import main

raise SystemExit(main())
