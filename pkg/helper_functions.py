import os
import json
import logging
from pathlib import Path

DEFAULT_CONFIG = {
    "seed": 20240101,
    "samples": 10000,
    "workers": 1,
    "format": "json",
    "chunk_size": 1024,
    "exact_limit": 5,
    "inner_quadruples": 64,
    "bootstrap_resamples": 200,
    "poisson_tail": 1e-12,
    "confidence": 1 - 1e-4,
    "log_level": "INFO",
    "log_dir": "logs",
}


def setup_logging(level=None, log_dir="logs"):
    """Set up logging for steinlab: a log file under log_dir plus stderr"""
    handlers = [logging.StreamHandler()]
    if log_dir:
        log_path = Path(log_dir)
        log_path.mkdir(exist_ok=True)
        handlers.append(logging.FileHandler(log_path / "steinlab.log"))

    logging.basicConfig(
        level=getattr(logging, str(level or "INFO").upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers
    )

    return logging.getLogger("steinlab")


def default_workers():
    """Worker count from STEINLAB_THREADS, falling back to the configured default"""
    raw = os.environ.get("STEINLAB_THREADS", "")
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_CONFIG["workers"]
    return value if value >= 1 else DEFAULT_CONFIG["workers"]


def load_config(path="config.json"):
    """Load configuration from config.json or return the default config"""
    config_path = Path(path)
    default_config = {**DEFAULT_CONFIG, "workers": default_workers()}

    if config_path.exists():
        try:
            with open(config_path, "r") as f:
                config = json.load(f)
            # Environment wins over the file for the worker count
            if "STEINLAB_THREADS" in os.environ:
                config.pop("workers", None)
            return {**default_config, **config}
        except Exception as e:
            logging.getLogger("steinlab").error(
                f"Error loading config: {e}. Using default configuration.")
            return default_config
    else:
        try:
            with open(config_path, "w") as f:
                json.dump(DEFAULT_CONFIG, f, indent=4)
        except OSError as e:
            logging.getLogger("steinlab").warning(f"Could not write default config: {e}")

        return default_config


def write_text(text, out_path=None):
    """Write serialized records to out_path, or stdout when no path is given"""
    if out_path is None:
        print(text, end="" if text.endswith("\n") else "\n")
        return
    path = Path(out_path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(text)
