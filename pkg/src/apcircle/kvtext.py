"""Flat ``key = value`` text documents used for phantom specs and engine
configuration files. Lines starting with ``#`` are comments; keys may repeat
(values accumulate in order)."""


def parse_kv_text(text: str) -> dict:
    """Parse a flat key-value document into {key: [values...]}."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        value = value.strip()
        if not key or not value:
            raise ValueError(f"line {lineno}: empty key or value in {raw!r}")
        out.setdefault(key, []).append(value)
    return out


def parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("on", "true", "yes", "1"):
        return True
    if lowered in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")
