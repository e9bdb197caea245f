"""Minimal config-file parser (a small TOML subset).

The runtime here has no TOML library, so the CLI reads a restricted
grammar that covers everything a run needs. Per line:

* blank lines and ``#`` comments (whole-line or after a value),
* ``[section]`` headers; keys below a header are reported as
  ``section.key``,
* ``key = value`` where key matches ``[A-Za-z0-9_-]+`` (hyphens are
  normalized to underscores) and value is one of:

  - integer: ``42``, ``-7``
  - float: ``0.5``, ``1e-3`` (anything with ``.``, ``e`` or ``E``)
  - boolean: ``true`` / ``false``
  - string: double-quoted, with ``\\\\`` and ``\\"`` escapes

Files using only these constructs are valid TOML, so a ``.toml`` suffix
is honest; full TOML (arrays, tables, multi-line strings) is rejected
with a clear error rather than misread.
"""

import re

from .errors import ConfigError

_KEY_RE = re.compile(r"^[A-Za-z0-9_-]+$")
_INT_RE = re.compile(r"^[+-]?[0-9]+$")


def _strip_comment(text):
    """Drop a trailing comment from a non-string value fragment."""
    return text.split("#", 1)[0].strip()


def _parse_string(value, path, lineno):
    """Parse a double-quoted string; returns (parsed, rest_after_quote)."""
    out = []
    i = 1
    while i < len(value):
        ch = value[i]
        if ch == "\\":
            if i + 1 >= len(value) or value[i + 1] not in ('"', "\\"):
                raise ConfigError(
                    path, lineno, r'only \" and \\ escapes are supported'
                )
            out.append(value[i + 1])
            i += 2
        elif ch == '"':
            return "".join(out), value[i + 1 :]
        else:
            out.append(ch)
            i += 1
    raise ConfigError(path, lineno, "unterminated string")


def _parse_value(value, path, lineno):
    value = value.strip()
    if not value:
        raise ConfigError(path, lineno, "missing value")
    if value.startswith('"'):
        parsed, rest = _parse_string(value, path, lineno)
        rest = rest.strip()
        if rest and not rest.startswith("#"):
            raise ConfigError(
                path, lineno, f"unexpected trailing content {rest!r}"
            )
        return parsed
    value = _strip_comment(value)
    if value in ("true", "false"):
        return value == "true"
    if _INT_RE.match(value):
        return int(value)
    try:
        parsed = float(value)
    except ValueError:
        raise ConfigError(
            path,
            lineno,
            f"cannot parse value {value!r} (strings need double quotes)",
        )
    if parsed != parsed or parsed in (float("inf"), float("-inf")):
        raise ConfigError(path, lineno, "non-finite numbers are not allowed")
    return parsed


def parse_config_text(text, path="<config>"):
    """Parse config text into a flat {key: value} dict."""
    result = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            header = _strip_comment(line)
            if not (header.startswith("[") and header.endswith("]")):
                raise ConfigError(path, lineno, f"malformed section {line!r}")
            name = header[1:-1].strip()
            if not _KEY_RE.match(name):
                raise ConfigError(
                    path, lineno, f"malformed section name {name!r}"
                )
            section = name.replace("-", "_") + "."
            continue
        if "=" not in line:
            raise ConfigError(path, lineno, f"expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(path, lineno, f"malformed key {key!r}")
        key = section + key.replace("-", "_")
        if key in result:
            raise ConfigError(path, lineno, f"duplicate key {key!r}")
        result[key] = _parse_value(value, path, lineno)
    return result


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), path=path)
