"""Access to the example models shipped with the package."""

from importlib import resources

from .errors import InputError
from .model import RobotModel, load_model

BUNDLED_MODELS = ("pendulum", "planar2", "arm7")


def bundled_model_text(name: str) -> str:
    if name not in BUNDLED_MODELS:
        raise InputError(f"unknown bundled model {name!r}; available: {', '.join(BUNDLED_MODELS)}")
    return (resources.files(__package__) / "data" / f"{name}.yaml").read_text(encoding="utf-8")


def load_bundled(name: str) -> RobotModel:
    return load_model(bundled_model_text(name))
