from typing import Any, Iterable, Iterator, List, Optional, Tuple
import json
import os
from logging_config import logger

DEFAULTS = {
    "limits": {
        "max_carrier": 1000000,
        "enumeration_budget": 200000,
        "table_carrier_limit": 1024,
    },
    "verify": {
        "exhaustive_subset_limit": 16,
        "sampled_subsets": 1000,
        "sampled_pairs": 20000,
        "max_family_size": 4,
        "family_sample": 5000,
        "exhaustive_small_subsets_carrier": 64,
        "enumeration_budget": 20000,
        "seed": 0,
    },
    "search": {
        "exhaustive_lattice_size": 6,
        "max_lattice_size": 6,
        "random_lattices": 200,
        "max_factors": 2,
        "max_carrier": 64,
        "workers": 1,
    },
    "bases": {
        "max_size": 3,
    },
    "settings": {
        "data_folder": "data",
        "output_folder": "results",
        "report_filename": "theorem_report.csv",
    },
}


def load_config(config_path: Optional[str] = None):
    """
    Load configuration settings from a JSON file.

    Args:
        config_path (str): Path to the configuration file. Defaults to the
            QUASILAT_CONFIG environment variable, then to the config.json
            that sits next to this module.

    Returns:
        dict or None: Configuration settings if successful, otherwise None.
    """
    if config_path is None:
        config_path = os.getenv(
            "QUASILAT_CONFIG",
            os.path.join(os.path.dirname(os.path.abspath(__file__)), "config.json"),
        )
    try:
        with open(config_path, 'r') as config_file:
            return json.load(config_file)
    except FileNotFoundError:
        logger.error(f"Config file '{config_path}' not found.")
        return None
    except json.JSONDecodeError:
        logger.error("Error decoding JSON config file.")
        return None
    except Exception as e:
        logger.error(f"Error loading configuration: {e}")
        return None


def setting(section: str, key: str) -> Any:
    """
    Read one configuration value, falling back to the built-in default.

    Args:
        section (str): Top-level section of config.json, e.g. "limits".
        key (str): Key inside the section.

    Returns:
        Any: The configured value, or the default when the file or key is missing.

    Raises:
        KeyError: If neither the configuration nor the defaults know the key.
    """
    if config and key in config.get(section, {}):
        return config[section][key]
    return DEFAULTS[section][key]


def override(section: str, key: str, value: Any) -> None:
    """Replace one configuration value for the rest of the run (CLI flags)."""
    global config
    if value is None:
        return
    if config is None:
        config = {}
    config.setdefault(section, {})[key] = value
    logger.debug(f"Config override {section}.{key} = {value}")


# Bitsets: subsets of 0..n-1 are stored as Python ints, bit i set iff i is a member.

def iter_bits(mask: int) -> Iterator[int]:
    """Yield the members of a bitset in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits(mask: int) -> List[int]:
    return list(iter_bits(mask))


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def full_mask(n: int) -> int:
    return (1 << n) - 1


def sort_key(mask: int) -> Tuple[int, Tuple[int, ...]]:
    """Canonical order of subsets: by size, then by the sorted member list."""
    members = tuple(iter_bits(mask))
    return len(members), members


config = load_config()
