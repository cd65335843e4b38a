"""
Script principal del laboratorio.

Uso:
    uv run python scripts/sharp_interface_lab.py run --config configs/circle_2d.json
    uv run python scripts/sharp_interface_lab.py sweep --config configs/front_1d.json --strict
"""
import sys
from pathlib import Path

# Agregar src al path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import main


if __name__ == "__main__":
    sys.exit(main())
