from __future__ import annotations

from typing import Any

from clonekit.core.sorts import Context, Sort
from clonekit.core.terms import CloneApp, MetaApp, Op, Term, Var


class CodecError(ValueError):
    pass


def sort_to_json(sort: Sort) -> Any:
    if not sort.args:
        return sort.name
    return [sort.name, *(sort_to_json(arg) for arg in sort.args)]


def sort_from_json(data: Any) -> Sort:
    if isinstance(data, str):
        return Sort(data)
    if isinstance(data, list) and data and isinstance(data[0], str):
        return Sort(data[0], tuple(sort_from_json(arg) for arg in data[1:]))
    raise CodecError(f"Not a sort: {data!r}")


def context_to_json(context: Context) -> list:
    return [sort_to_json(sort) for sort in context]


def context_from_json(data: Any) -> Context:
    if not isinstance(data, list):
        raise CodecError(f"Not a context: {data!r}")
    return tuple(sort_from_json(entry) for entry in data)


def term_to_json(term: Term) -> dict:
    match term:
        case Var(index):
            return {"var": index}
        case MetaApp(meta, args):
            return {"meta": meta, "args": [term_to_json(arg) for arg in args]}
        case Op(name, args, params, binders):
            data: dict = {"op": name, "args": [term_to_json(arg) for arg in args]}
            if params:
                data["params"] = [sort_to_json(p) for p in params]
            if binders:
                data["binders"] = [context_to_json(b) for b in binders]
            return data
        case CloneApp(element, context, sort, args):
            return {
                "clone": element_to_json(element),
                "context": context_to_json(context),
                "sort": sort_to_json(sort),
                "args": [term_to_json(arg) for arg in args],
            }
    raise CodecError(f"Cannot encode {term!r}")


def term_from_json(data: Any) -> Term:
    if not isinstance(data, dict):
        raise CodecError(f"Not a term: {data!r}")
    args = tuple(term_from_json(arg) for arg in data.get("args", []))
    if "var" in data:
        return Var(int(data["var"]))
    if "meta" in data:
        return MetaApp(int(data["meta"]), args)
    if "op" in data:
        params = tuple(sort_from_json(p) for p in data.get("params", []))
        binders = tuple(context_from_json(b) for b in data.get("binders", []))
        return Op(str(data["op"]), args, params, binders)
    if "clone" in data:
        return CloneApp(
            element_from_json(data["clone"]),
            context_from_json(data["context"]),
            sort_from_json(data["sort"]),
            args,
        )
    raise CodecError(f"Unknown term node: {sorted(data)}")


def element_to_json(element: Any) -> Any:
    """Base-clone elements are terms of a presented clone, plain indices, or nested tuples."""
    if isinstance(element, (Var, Op, MetaApp, CloneApp)):
        return {"term": term_to_json(element)}
    if isinstance(element, tuple):
        return {"tuple": [element_to_json(e) for e in element]}
    if isinstance(element, (int, str)):
        return element
    raise CodecError(f"Cannot encode clone element {element!r}")


def element_from_json(data: Any) -> Any:
    if isinstance(data, dict) and "term" in data:
        return term_from_json(data["term"])
    if isinstance(data, dict) and "tuple" in data:
        return tuple(element_from_json(e) for e in data["tuple"])
    if isinstance(data, (int, str)):
        return data
    raise CodecError(f"Not a clone element: {data!r}")
