import os


def format_secs(secs: float) -> str:
    return f"{secs:.3f} secs"


def ensure_dir(directory):
    if directory:
        os.makedirs(directory, exist_ok=True)
