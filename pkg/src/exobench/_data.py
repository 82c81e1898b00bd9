"""Access to data files shipped inside the package."""

from importlib.resources import files


def data_path(*parts) -> str:
    """Absolute path of a packaged data file, e.g. data_path('presets', 'qdd.yaml')."""
    p = files("exobench").joinpath("data", *parts)
    return str(p)
