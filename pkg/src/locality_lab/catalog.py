"""Bundled group catalog: small constrained hosts, two groups that are not of
characteristic p at their designated prime, and the flagship product with one
component. Files use the group-spec grammar parsed by groups.parse_group_spec."""

from __future__ import annotations

import os
from importlib import resources

from .groups import FiniteGroup, ORDER_CAP_DEFAULT, parse_group_spec

# shipped instances in deterministic order
CATALOG_IDS = [
    "trivial-group", "c2", "c4", "v4", "d8", "q8", "a4", "s4", "sl23",
    "a4xc2", "s3", "dic3", "psl27", "psl27xs4",
]


def catalog_dir() -> str:
    return str(resources.files("locality_lab").joinpath("catalog"))


def spec_text(instance_id: str, directory: str | None = None) -> str:
    d = directory or catalog_dir()
    path = os.path.join(d, instance_id + ".grp")
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, "r") as fh:
        return fh.read()


def list_catalog(directory: str | None = None) -> list[dict]:
    d = directory or catalog_dir()
    out = []
    ids = CATALOG_IDS if directory is None else sorted(
        f[:-4] for f in os.listdir(d) if f.endswith(".grp"))
    for iid in ids:
        degree, prime, perms = parse_group_spec(spec_text(iid, d))
        out.append({"id": iid, "degree": degree, "prime": prime, "ngens": len(perms)})
    return out


def load_catalog_group(instance_id: str, directory: str | None = None,
                       cap: int = ORDER_CAP_DEFAULT) -> FiniteGroup:
    G = FiniteGroup.from_spec(spec_text(instance_id, directory), cap=cap, name=instance_id)
    return G
