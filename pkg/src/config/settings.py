"""
Carga variables de entorno del laboratorio
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Obtener la ruta a la raíz del proyecto
ROOT_DIR = Path(__file__).resolve().parent.parent.parent
ENV_PATH = ROOT_DIR / ".env"

# Cargar variables de entorno desde .env
load_dotenv(dotenv_path=ENV_PATH)

def get_env_variable(var_name: str, required: bool = True, default: str | None = None) -> str | None:
    value = os.getenv(var_name, default)
    if required and not value:
        raise ValueError(
            f"Variable de entorno '{var_name}' no encontrada. "
            f"Asegurate de que existe en {ENV_PATH}"
        )
    return value


def get_int_variable(var_name: str, default: int) -> int:
    raw = get_env_variable(var_name, required=False, default=str(default))
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"Variable de entorno '{var_name}' debe ser entera, recibido '{raw}'")
    if value < 1:
        raise ValueError(f"Variable de entorno '{var_name}' debe ser ≥ 1")
    return value


# Límite de workers para barridos y conexiones muestreadas
SIL_THREADS = get_int_variable("SIL_THREADS", 1)
SIL_OUTPUT_DIR = get_env_variable("SIL_OUTPUT_DIR", required=False, default="outputs")
SIL_LOG_DIR = get_env_variable("SIL_LOG_DIR", required=False, default=f"{SIL_OUTPUT_DIR}/logs")

"""
SIL_THREADS se lee una vez al importar; los procesos hijos de un barrido lo
heredan del entorno. Ninguna variable es obligatoria.
"""
