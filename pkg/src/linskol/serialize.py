"""Versioned JSON for proof trees.

Every dataclass is written as ``{"op": ClassName, field: value, ...}``; a
variable carries its uid so identity survives the round trip.
"""

from __future__ import annotations

import dataclasses
import json
from typing import Any

from . import syntax
from .ljf import LProofTree
from .sljf import SProofTree
from .substitution import Substitution
from .syntax import Var, VarKind

SCHEMA = "linskol/1"

_CLASSES = {
    cls.__name__: cls
    for cls in (
        syntax.App,
        syntax.Tup,
        syntax.EigenApp,
        syntax.NAtom,
        syntax.PAtom,
        syntax.Lolli,
        syntax.Forall,
        syntax.Up,
        syntax.Tensor,
        syntax.Bang,
        syntax.Exists,
        syntax.Down,
        syntax.SNAtom,
        syntax.SPAtom,
        syntax.SLolli,
        syntax.SUp,
        syntax.STensor,
        syntax.SBang,
        syntax.SDown,
        syntax.Closure,
        syntax.Sequent,
        syntax.SSequent,
        LProofTree,
        SProofTree,
    )
}
_SKIP = {"source"}


class SchemaError(ValueError):
    pass


def encode(x) -> Any:
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, Var):
        out = {"var": x.name, "kind": x.kind.value, "uid": x.uid}
        if x.pair is not None:
            out["pair"], out["side"] = x.pair, x.side
        return out
    if isinstance(x, Substitution):
        return {"op": "Substitution", "entries": [[encode(v), encode(t)] for v, t in x.items()]}
    if isinstance(x, tuple):
        return [encode(y) for y in x]
    if isinstance(x, dict):
        return {"op": "dict", "items": {k: encode(v) for k, v in x.items()}}
    if dataclasses.is_dataclass(x) and type(x).__name__ in _CLASSES:
        out = {"op": type(x).__name__}
        for f in dataclasses.fields(x):
            if f.name not in _SKIP:
                out[f.name] = encode(getattr(x, f.name))
        return out
    raise TypeError(f"cannot encode {type(x).__name__}")


def decode(d) -> Any:
    if d is None or isinstance(d, (bool, int, str)):
        return d
    if isinstance(d, list):
        return tuple(decode(y) for y in d)
    if not isinstance(d, dict):
        raise SchemaError(f"unexpected JSON value {d!r}")
    if "op" not in d:
        try:
            return Var(d["var"], VarKind(d["kind"]), int(d["uid"]), d.get("pair"), d.get("side"))
        except (KeyError, ValueError) as e:
            raise SchemaError(f"bad variable {d!r}") from e
    op = d.get("op")
    if op == "Substitution":
        return Substitution([(decode(v), decode(t)) for v, t in d["entries"]])
    if op == "dict":
        return {k: decode(v) for k, v in d["items"].items()}
    cls = _CLASSES.get(op)
    if cls is None:
        raise SchemaError(f"unknown node type {op!r}")
    kwargs = {k: decode(v) for k, v in d.items() if k != "op"}
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise SchemaError(f"{op}: {e}") from e


def proof_to_json(tree: LProofTree | SProofTree, **extra) -> dict:
    kind = "ljf" if isinstance(tree, LProofTree) else "sljf"
    doc = {"schema": SCHEMA, "kind": kind, "proof": encode(tree)}
    doc.update(extra)
    return doc


def proof_from_json(doc: dict | str) -> LProofTree | SProofTree:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise SchemaError(f"expected schema {SCHEMA!r}")
    tree = decode(doc.get("proof"))
    want = LProofTree if doc.get("kind") == "ljf" else SProofTree
    if not isinstance(tree, want):
        raise SchemaError(f"the proof is not a {doc.get('kind')} tree")
    return tree


def check_proof(tree: LProofTree | SProofTree) -> bool:
    """Re-validate a decoded tree with the matching checker (raises on failure)."""
    if isinstance(tree, LProofTree):
        from .ljf import check_ljf

        return check_ljf(tree)
    from .sljf import check_sljf

    return check_sljf(tree)
