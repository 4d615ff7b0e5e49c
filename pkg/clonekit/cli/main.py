"""The ``clonekit`` command line.

Every command reads a theory bundle, addresses one theory by name and prints
either readable text or a JSON document carrying ``schema_version``. Logs go
to stderr; stdout carries only command output.

Exit codes: 0 success, 1 a check or verdict failed, 2 usage or parse error,
3 a budget ran out before a verdict.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from itertools import islice
from pathlib import Path
from typing import Sequence

from clonekit.cli.bundle import BundleError, Theory, TheoryBundle, load_bundle
from clonekit.cli.surface import Printer, Resolver, SurfaceError, parse_context_names, parse_sort, parse_surface
from clonekit.config import DEFAULT_WITNESSES, Budget, get_settings
from clonekit.core.clones import CloneError
from clonekit.core.codec import CodecError, sort_from_json
from clonekit.core.laws import LawReport, check_clone_laws
from clonekit.core.sorts import Context, Sort, SortError, is_arrow
from clonekit.core.terms import Term, term_size
from clonekit.free.derivations import check_free_derivation, free_derivation_from_dict, free_derivation_to_dict
from clonekit.free.equality import free_equal
from clonekit.free.terms import enumerate_free_terms
from clonekit.logging_config import setup_logging
from clonekit.presentations.derivations import check_fo_derivation, fo_derivation_from_dict, fo_derivation_to_dict
from clonekit.presentations.first_order import PresentationError, enumerate_fo_terms, fo_check
from clonekit.presentations.rewrite import RewriteDivergence, rewrite_normalize
from clonekit.presentations.search import UNKNOWN, search_equal
from clonekit.presentations.tm_clone import RewriteEquality
from clonekit.second_order.algebra import check_algebra
from clonekit.stlc.adequacy import adequacy_harness
from clonekit.stlc.nbe import nbe_normalize
from clonekit.stlc.normal_forms import check_normal
from clonekit.stlc.set_model import eval_closed, model_hom, render_value, set_model, value_frame, value_to_json
from clonekit.stlc.variants import VARIANTS
from clonekit.stlc.witness import witness_normalize

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

COMMANDS = ("check", "normalize", "eval", "equal", "provecheck", "enumerate", "adequacy")
DEFAULT_THEORY = {"eval": "bool", "adequacy": "bool"}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class CommandConfig:
    command: str
    bundle: Path
    theory: str | None
    budget: Budget
    json: bool = False
    witness: bool = False
    eta_long: bool = False
    model_size: int = 2
    sort: Sort | None = None
    inputs: tuple[str, ...] = ()

    def theory_name(self) -> str:
        return self.theory or DEFAULT_THEORY.get(self.command, "stlc")


@dataclass
class Outcome:
    status: int
    data: dict = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)


def _reserved(theory: Theory) -> tuple[str, ...]:
    names = []
    if theory.presentation is not None:
        names += [op.name for op in theory.presentation.signature.operators]
    if theory.base_presentation is not None:
        names += [op.name for op in theory.base_presentation.signature.operators]
    return tuple(names)


def _read(theory: Theory, texts: Sequence[str], open: bool = True) -> tuple[tuple[str, ...], Context, list[Term]]:
    """Resolve several terms against one context: the first explicit ``Γ |-`` wins, unknown names are shared."""
    surfaces = [parse_surface(text) for text in texts]
    declared = next((s.context for s in surfaces if s.context), ())
    names = tuple(name for name, _ in declared)
    resolver = Resolver(theory.shape, base=theory.base_sort, open=open)
    for surface in surfaces:
        resolver.scan(surface.term, names)
    names += tuple(resolver.opened)
    context = tuple(sort for _, sort in declared) + (theory.base_sort,) * len(resolver.opened)
    return names, context, [resolver.resolve(s.term, names) for s in surfaces]


def _is_first_order(theory: Theory, context: Context, term: Term) -> bool:
    if theory.base_presentation is None:
        return False
    try:
        fo_check(theory.base_presentation.signature, context, term)
    except (SortError, CloneError):
        return False
    return True


def _report_lines(report: LawReport) -> list[str]:
    lines = [f"{report.subject}: {'pass' if report.passed else 'FAIL'}"]
    lines += ["  " + row for row in report.to_frame().to_string(index=False).splitlines()]
    for result in report.results:
        if not result.passed:
            lines.append(f"  counterexample for {result.law}: {json.dumps(result.counterexample, ensure_ascii=False)}")
    return lines


def cmd_check(config: CommandConfig, bundle: TheoryBundle) -> Outcome:
    """Assemble every theory and run its law checks; an empty bundle passes."""
    names = [config.theory] if config.theory else list(bundle.theories)
    outcome = Outcome(EXIT_OK, {"theories": []})
    for name in names:
        theory = bundle.theory(name)
        entry: dict = {"theory": name, "reports": []}
        outcome.data["theories"].append(entry)
        try:
            theory.assemble()
        except BundleError as exc:
            entry["error"] = str(exc)
            outcome.status = EXIT_FAILED
            outcome.lines.append(f"{name}: FAIL {exc}")
            continue
        reports = [check_clone_laws(theory.base_clone, config.budget)]
        if theory.presentation is not None:
            free = theory.free(budget=config.budget)
            reports.append(check_clone_laws(free, config.budget))
            if theory.stlc_shaped and theory.kind in ("var", "bool"):
                model = set_model(config.model_size, theory.sorts)
                reports.append(check_algebra(model.algebra(theory.presentation), theory.presentation, config.budget))
        for report in reports:
            entry["reports"].append(report.to_dict())
            outcome.lines += [f"{name}: " + line if i == 0 else line for i, line in enumerate(_report_lines(report))]
            if not report.passed:
                outcome.status = EXIT_FAILED
        entry["passed"] = all(r.passed for r in reports)
    outcome.data["passed"] = outcome.status == EXIT_OK
    if not names:
        outcome.lines.append("no theories declared")
    return outcome


def _fo_normalize(config: CommandConfig, theory: Theory, names, context: Context, term: Term) -> Outcome:
    presentation = theory.base_presentation
    term, sort = fo_check(presentation.signature, context, term, config.sort)
    clone = theory.base_clone
    printer = Printer(_reserved(theory))
    data: dict = {"context": printer.context(names, context), "sort": str(sort), "term": printer.term(term, names)}
    if isinstance(clone.strategy, RewriteEquality):
        result = rewrite_normalize(clone.strategy.system, term, config.budget, witness=config.witness)
        normal = result.term
        data["steps"] = len(result.steps)
        if config.witness:
            verdict = check_fo_derivation(presentation, result.derivation, context)
            checked = verdict.accepted and verdict.conclusion.rhs == normal
            data["witness"] = fo_derivation_to_dict(result.derivation)
            data["witness_checked"] = checked
    else:
        normal = clone.canonical(term, context, sort)
    data["normal_form"] = printer.term(normal, names)
    status = EXIT_FAILED if data.get("witness_checked") is False else EXIT_OK
    return Outcome(status, data, [data["normal_form"]])


def cmd_normalize(config: CommandConfig, theory: Theory) -> Outcome:
    """NbE normal form; first-order terms of a rewriting base go through the rewrite system unless ``--eta-long``."""
    names, context, (term,) = _read(theory, config.inputs[:1])
    if theory.first_order or (not config.eta_long and _is_first_order(theory, context, term)):
        return _fo_normalize(config, theory, names, context, term)
    if theory.variant is None or not theory.stlc_shaped:
        raise UsageError(f"theory {theory.name} has no normalizer")
    free = theory.free(budget=config.budget)
    term, sort = free.check(term, context, config.sort)
    printer = Printer(_reserved(theory))
    if config.witness:
        normal, proof = witness_normalize(free, term, context, sort)
    else:
        normal, proof = nbe_normalize(free, term, context, sort), None
    grammar = check_normal(theory.variant, context, normal, sort)
    data: dict = {
        "context": printer.context(names, context),
        "sort": str(sort),
        "term": printer.term(term, names),
        "normal_form": printer.term(normal, names),
        "grammar_checked": grammar.normal,
    }
    lines = [data["normal_form"]]
    status = EXIT_OK if grammar.normal else EXIT_FAILED
    if proof is not None:
        replay = check_free_derivation(free, proof, context, term, normal)
        data["witness"] = free_derivation_to_dict(proof)
        data["witness_checked"] = replay.accepted
        lines.append(f"witness: {replay.nodes} nodes, {'accepted' if replay.accepted else 'REJECTED ' + replay.reason}")
        if not replay.accepted:
            status = EXIT_FAILED
    return Outcome(status, data, lines)


def cmd_eval(config: CommandConfig, theory: Theory) -> Outcome:
    names, context, (term,) = _read(theory, config.inputs[:1])
    if context:
        raise UsageError(f"eval needs a closed term; free names: {', '.join(names)}")
    if theory.variant is None or not theory.stlc_shaped:
        raise UsageError(f"theory {theory.name} has no set model")
    model = set_model(config.model_size, theory.sorts)
    f = model_hom(theory.variant, model)
    free = theory.free(budget=config.budget)
    term, sort = free.check(term, (), config.sort)
    value = eval_closed(free, model, f, term, sort)
    data = {
        "model": model.name,
        "sort": str(sort),
        "term": Printer(_reserved(theory)).term(term),
        "value": value_to_json(model, sort, value),
    }
    lines = [render_value(model, sort, value)]
    if is_arrow(sort):
        lines += value_frame(model, sort, value).to_string(index=False).splitlines()
    return Outcome(EXIT_OK, data, lines)


def cmd_equal(config: CommandConfig, theory: Theory) -> Outcome:
    if len(config.inputs) < 2:
        raise UsageError("equal needs two terms: TERM --other TERM")
    names, context, (left, right) = _read(theory, config.inputs[:2])
    printer = Printer(_reserved(theory))
    data: dict = {"context": printer.context(names, context), "lhs": printer.term(left, names), "rhs": printer.term(right, names)}
    if theory.first_order:
        clone = theory.base_clone
        left, sort = clone.check(left, context, config.sort)
        right, _ = clone.check(right, context, sort)
        if clone.strategy.decides:
            equal = clone.equal(left, right, context, sort)
            proof = clone.witness(left, right, context, sort) if equal and config.witness else None
            data.update({"verdict": "equal" if equal else "not-equal", "tier": clone.strategy.tier})
        else:
            found = search_equal(clone.presentation, left, right, context, sort, config.budget)
            proof = found.derivation if config.witness else None
            data.update({"verdict": found.verdict, "tier": clone.strategy.tier, "expanded": found.expanded})
        data["sort"] = str(sort)
        if proof is not None:
            data["witness"] = fo_derivation_to_dict(proof)
    else:
        verdict = free_equal(theory.free(budget=config.budget), left, right, context, config.sort, config.budget)
        data.update(verdict.to_dict(config.witness))
    status = {"equal": EXIT_OK, UNKNOWN: EXIT_BUDGET}.get(data["verdict"], EXIT_FAILED)
    if data.get("witness_checked") is False:
        status = EXIT_FAILED
    return Outcome(status, data, [data["verdict"]])


def _check_entry(bundle: TheoryBundle, entry: dict, default_theory: str) -> dict:
    theory = bundle.theory(entry.get("theory", default_theory))
    declared = parse_context_names(entry.get("context", ""))
    names = tuple(name for name, _ in declared)
    context = tuple(sort for _, sort in declared)
    resolver = Resolver(theory.shape, base=theory.base_sort, open=False)
    lhs = resolver.resolve(parse_surface(entry["lhs"]).term, names)
    rhs = resolver.resolve(parse_surface(entry["rhs"]).term, names)
    if theory.first_order:
        presentation = theory.base_presentation
        verdict = check_fo_derivation(presentation, fo_derivation_from_dict(entry["derivation"]), context)
        if verdict.accepted:
            claimed = (fo_check(presentation.signature, context, lhs)[0], fo_check(presentation.signature, context, rhs)[0])
            if claimed != (verdict.conclusion.lhs, verdict.conclusion.rhs):
                verdict.accepted = False
                verdict.reason = "conclusion does not match the claimed equation"
    else:
        node = free_derivation_from_dict(entry["derivation"])
        verdict = check_free_derivation(theory.free(), node, context, lhs, rhs)
    if verdict.accepted and "sort" in entry and sort_from_json(entry["sort"]) != verdict.conclusion.sort:
        verdict.accepted = False
        verdict.reason = f"concludes at sort {verdict.conclusion.sort}, claimed {sort_from_json(entry['sort'])}"
    return {"name": entry.get("name", ""), "theory": theory.name, **verdict.to_dict()}


def cmd_provecheck(config: CommandConfig, bundle: TheoryBundle) -> Outcome:
    path = Path(config.inputs[0]) if config.inputs else DEFAULT_WITNESSES
    try:
        corpus = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"Cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(corpus, dict) or not isinstance(corpus.get("witnesses"), list):
        raise UsageError(f"{path}: expected an object with a witnesses list")
    results = [_check_entry(bundle, entry, config.theory_name()) for entry in corpus["witnesses"]]
    accepted = sum(r["accepted"] for r in results)
    lines = [f"{r['name']}: {'accepted' if r['accepted'] else 'REJECTED ' + r['reason']}" for r in results]
    lines.append(f"{accepted}/{len(results)} accepted")
    status = EXIT_OK if accepted == len(results) else EXIT_FAILED
    return Outcome(status, {"file": path.name, "results": results, "accepted": accepted, "total": len(results)}, lines)


def cmd_enumerate(config: CommandConfig, theory: Theory) -> Outcome:
    declared = parse_context_names(config.inputs[0]) if config.inputs else ()
    names = tuple(name for name, _ in declared)
    context = tuple(sort for _, sort in declared)
    sort = config.sort or theory.base_sort
    budget = config.budget
    if theory.first_order:
        found = enumerate_fo_terms(theory.base_presentation.signature, context, sort, budget.max_depth)
    else:
        free = theory.free(budget=budget)
        pool = theory.sorts.sorts(budget.sort_height)
        if sort not in pool:
            pool = pool + [sort]
        found = enumerate_free_terms(free.base, free.presentation.signature, context, sort, budget.max_size, pool)
    terms = list(islice(found, budget.max_terms + 1))
    truncated = len(terms) > budget.max_terms
    if truncated:
        logger.warning("Enumeration at %s truncated at %s terms", sort, budget.max_terms)
        terms = terms[: budget.max_terms]
    printer = Printer(_reserved(theory))
    rows = [{"term": printer.term(t, names), "size": term_size(t)} for t in terms]
    data = {"context": printer.context(names, context), "sort": str(sort), "terms": rows, "exhaustive": not truncated}
    return Outcome(EXIT_OK, data, [row["term"] for row in rows])


def cmd_adequacy(config: CommandConfig, theory: Theory) -> Outcome:
    if theory.kind != "bool" or not theory.stlc_shaped:
        raise UsageError(f"adequacy needs an STLC theory over booleans, not {theory.name}")
    report = adequacy_harness(config.budget.max_size, config.budget, theory.variant, theory.presentation)
    lines = [
        f"bound {report.bound}: {report.terms} closed terms, {report.pairs} pairs, "
        f"{len(report.counterexamples)} counterexamples ({report.seconds:.2f}s)",
        f"normal forms: {', '.join(report.normal_forms)}",
    ]
    if report.counterexamples:
        lines += report.to_frame().to_string(index=False).splitlines()
    return Outcome(EXIT_OK if report.passed else EXIT_FAILED, report.to_dict(), lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clonekit",
        description="Check second-order presentations, normalize and evaluate terms, verify equational proofs.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("inputs", nargs="*", help="term, context or witness file, depending on the command")
    parser.add_argument("--bundle", type=Path, help="theory bundle (default: CLONEKIT_BUNDLE or the shipped one)")
    parser.add_argument("--theory", help="theory name in the bundle (default: the --variant name)")
    parser.add_argument("--variant", choices=VARIANTS)
    parser.add_argument("--budget", type=int, help="search node budget")
    parser.add_argument("--depth", type=int, help="first-order enumeration depth")
    parser.add_argument("--size", type=int, help="free term size bound")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--sort", help="expected sort, e.g. 'b => b'")
    parser.add_argument("--other", help="second term for equal")
    parser.add_argument("--model-size", type=int, help="elements of the base set in the finite model")
    parser.add_argument("--eta-long", action="store_true", help="normalize first-order terms with NbE too")
    parser.add_argument("--witness", action="store_true", help="emit the checked ≈ derivation")
    parser.add_argument("--json", action="store_true", help="print a JSON document")
    parser.add_argument("--log-level", help="override LOG_LEVEL")
    return parser


def command_config(args: argparse.Namespace) -> CommandConfig:
    settings = get_settings()
    changes = {
        key: value
        for key, value in (
            ("search_nodes", args.budget),
            ("max_depth", args.depth),
            ("max_size", args.size),
            ("seed", args.seed),
        )
        if value is not None
    }
    inputs = tuple(args.inputs) + ((args.other,) if args.other is not None else ())
    model_size = args.model_size if args.model_size is not None else settings.model_size
    if model_size < 1:
        raise UsageError(f"--model-size must be positive, got {model_size}")
    return CommandConfig(
        command=args.command,
        bundle=args.bundle or settings.bundle_path,
        theory=args.theory or args.variant,
        budget=settings.budget.replace(**changes),
        json=args.json,
        witness=args.witness,
        eta_long=args.eta_long,
        model_size=model_size,
        sort=parse_sort(args.sort) if args.sort else None,
        inputs=inputs,
    )


def dispatch(config: CommandConfig) -> Outcome:
    bundle = load_bundle(config.bundle)
    if config.command == "check":
        return cmd_check(config, bundle)
    if config.command == "provecheck":
        return cmd_provecheck(config, bundle)
    if config.command in ("normalize", "eval", "equal") and not config.inputs:
        raise UsageError(f"{config.command} needs a term")
    theory = bundle.theory(config.theory_name())
    handler = {
        "normalize": cmd_normalize,
        "eval": cmd_eval,
        "equal": cmd_equal,
        "enumerate": cmd_enumerate,
        "adequacy": cmd_adequacy,
    }[config.command]
    return handler(config, theory)


def emit(config: CommandConfig, outcome: Outcome) -> None:
    if config.json:
        document = {"schema_version": SCHEMA_VERSION, "command": config.command, "exit": outcome.status, **outcome.data}
        print(json.dumps(document, indent=2, ensure_ascii=False, sort_keys=True))
    else:
        for line in outcome.lines:
            print(line)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    setup_logging(args.log_level or settings.log_level, sys.stderr)
    try:
        config = command_config(args)
        outcome = dispatch(config)
    except (BundleError, SurfaceError, UsageError, SortError, CodecError, PresentationError, CloneError) as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RewriteDivergence as exc:
        logger.error("Budget exhausted: %s", exc)
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    emit(config, outcome)
    return outcome.status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
