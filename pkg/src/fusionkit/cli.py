"""Command-line verification harness.

    fusionkit verify --suite lemmas|fusion|gg|extensions [--group SPEC ...] [--prime P]
                     [--out PATH] [--format json|text] [--budget-elements N]
                     [--budget-closure N] [--config FILE] [--rv-model] [--timings] [--jobs N]

Each suite turns its groups into report entries (systemId, operation, verdict,
witness).  Entries are sorted, so the json output is byte-identical across
runs; wall-clock times are only recorded with ``--timings``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, ResourceError

SUITES = ("lemmas", "fusion", "gg", "extensions")
FORMATS = ("json", "text")
PASS, FAIL, PRECONDITION, SKIPPED = "pass", "fail", "precondition-violated", "skipped-budget"
VERDICTS = (PASS, FAIL, PRECONDITION, SKIPPED)

DEFAULT_BUDGET_ELEMENTS = 10**7
DEFAULT_BUDGET_CLOSURE = 10**7
RV_MODEL_ELEMENTS = 10**5

# groups run when none are given
DEFAULT_GROUPS = {
    "lemmas": ["catalog-upto:64", "extras:lemmas", "builtin:psp4:4"],
    "fusion": ["builtin:sym:4", "builtin:dihedral:8", "builtin:psl3:2", "builtin:alt:6",
               "builtin:sym:6", "builtin:psl2:8", "builtin:psl3:4", "builtin:psp4:4",
               "file:2x2.psl3_4.perm"],
    "gg": ["builtin:psl2:8", "builtin:psl3:2", "builtin:alt:6", "builtin:sz:8", "builtin:psu3:4",
           "builtin:psl3:4", "builtin:psp4:4", "builtin:sym:8"],
    "extensions": ["catalog-upto:16"],
}

EXPECTED_GG = {
    "builtin:psl2:8": "abelian-i",
    "builtin:psl3:2": "dih8-ii",
    "builtin:alt:6": "dih8-ii",
    "builtin:sz:8": "rank2-iii",
    "builtin:psu3:4": "rank2-iii",
    "builtin:psl3:4": "rank2-iii",
    "builtin:psp4:4": "rank2-iii",
    "builtin:sym:8": "classtoobig",
}

# spec -> (number of essential classes, their order)
EXPECTED_ESSENTIALS = {
    "builtin:psl3:2": (2, 4),
    "builtin:alt:6": (2, 4),
    "builtin:psl3:4": (2, 16),
    "builtin:psp4:4": (2, 64),
}
EXPECTED_PARABOLIC = {"builtin:psl3:4": True, "builtin:psp4:4": True}
EXPECTED_KNOWN = {"builtin:psl3:2": "PSL3(2)", "builtin:alt:6": "PSL3(2)",
                  "builtin:sym:6": "PSp4(2)", "builtin:psl3:4": "PSL3(4)",
                  "builtin:psp4:4": "PSp4(4)"}


@dataclass
class SuiteConfig:
    suite: str
    groups: list = field(default_factory=list)
    prime: int = 2
    out: str = None
    format: str = "json"
    budget_elements: int = DEFAULT_BUDGET_ELEMENTS
    budget_closure: int = DEFAULT_BUDGET_CLOSURE
    rv_model: bool = False
    timings: bool = False
    jobs: int = 1

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        for name in ("budget_elements", "budget_closure", "jobs", "prime"):
            v = getattr(self, name)
            if not isinstance(v, int) or v <= 0:
                raise ConfigError(f"{name.replace('_', '-')} must be a positive integer")
        if self.prime < 2 or any(self.prime % d == 0 for d in range(2, int(self.prime**0.5) + 1)):
            raise ConfigError(f"prime {self.prime} is not prime")
        if not self.groups:
            self.groups = list(DEFAULT_GROUPS[self.suite])

    def echo(self):
        d = asdict(self)
        d.pop("jobs")        # parallelism does not change the report
        return {k.replace("_", "-"): v for k, v in d.items()}


@dataclass
class ReportEntry:
    systemId: str
    operation: str
    verdict: str
    witness: dict = field(default_factory=dict)
    elapsedMillis: int = None

    def as_dict(self, timings=False):
        d = {"systemId": self.systemId, "operation": self.operation,
             "verdict": self.verdict, "witness": self.witness}
        if timings:
            d["elapsedMillis"] = self.elapsedMillis
        return d


# -- config ---------------------------------------------------------------------------

def _int(key, text):
    try:
        return int(str(text).replace("_", ""))
    except ValueError:
        raise ConfigError(f"{key} expects an integer, got {text!r}") from None


def _bool(key, text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} expects a boolean, got {text!r}")


CONFIG_KEYS = {
    "suite": str, "group": None, "groups": None, "prime": _int, "out": str, "format": str,
    "budget-elements": _int, "budget-closure": _int, "rv-model": _bool, "timings": _bool,
    "jobs": _int,
}


def read_config(path):
    """``key = value`` lines; ``#`` starts a comment; group may repeat or list several specs."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"missing config file {path}")
    out = {}
    for n, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line.split()[0] else None
        if sep is None:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split(sep, 1))
        key = key.replace("_", "-")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        if key in ("group", "groups"):
            out.setdefault("groups", []).extend(value.replace(",", " ").split())
        else:
            conv = CONFIG_KEYS[key]
            out[key] = conv(key, value) if conv is not str else value
    return out


def build_config(args) -> SuiteConfig:
    values = read_config(args.config) if args.config else {}
    overrides = {"suite": args.suite, "groups": args.group or None, "prime": args.prime,
                 "out": args.out, "format": args.format, "budget-elements": args.budget_elements,
                 "budget-closure": args.budget_closure, "jobs": args.jobs}
    for k, v in overrides.items():
        if v is not None:
            values[k] = v
    for flag in ("rv_model", "timings"):
        if getattr(args, flag):
            values[flag.replace("_", "-")] = True
    if "suite" not in values:
        raise ConfigError("no suite given (use --suite or a config file)")
    kw = {k.replace("-", "_"): v for k, v in values.items()}
    return SuiteConfig(**kw)


# -- group selection --------------------------------------------------------------------

def expand_groups(items):
    """Spec strings, plus the selectors catalog-upto:N and extras:lemmas."""
    from .catalog import default_catalog, parse_spec
    out = []
    for item in items:
        if item.startswith("catalog-upto:"):
            bound = _int(item, item.split(":", 1)[1])
            out += [f"builtin:catalog-id:{e.id[0]}.{e.id[1]}" for e in default_catalog() if e.order <= bound]
        elif item == "extras:lemmas":
            out += ["extra:D8xD8xC2", "extra:Q8xQ8xC2", "extra:D8xQ8xC2", "extra:D8wrC2"]
        elif item.startswith("extra:"):
            out.append(item)
        else:
            out.append(str(parse_spec(item)))
    seen, uniq = set(), []
    for g in out:
        if g not in seen:
            seen.add(g)
            uniq.append(g)
    return uniq


def _extra(name):
    from .pgroup import lemma_extras
    for n, G in lemma_extras():
        if f"extra:{n}" == name:
            return G
    raise ConfigError(f"unknown extra group {name!r}")


def group_order(spec_text, budget):
    """Order of the named group; ResourceError beyond the element budget."""
    from .catalog import build_group, parse_spec
    if spec_text.startswith("extra:"):
        return 128
    spec = parse_spec(spec_text)
    if spec.family == "catalog-id":
        return spec.parameter[0]
    return build_group(spec, max_order=budget).order


def p_group_of(spec_text, p):
    """The group itself when it is a p-group, otherwise a Sylow p-subgroup."""
    from .catalog import catalog_entry, direct_sylow_group, enumerated, parse_spec
    from .group import sylow_subgroup
    if spec_text.startswith("extra:"):
        return _extra(spec_text)
    spec = parse_spec(spec_text)
    if spec.family == "catalog-id":
        return catalog_entry(*spec.parameter).group
    if p == 2:
        try:
            return direct_sylow_group(spec)
        except (ConfigError, KeyError, NotImplementedError, ValueError):
            pass
    G = enumerated(spec_text)
    return sylow_subgroup(G, p).as_group(name=f"Syl{p}({spec.label})")


# -- suites --------------------------------------------------------------------------

def _verdict(ok, applicable=True):
    if not applicable:
        return PRECONDITION
    return PASS if ok else FAIL


def _lemma_entries(sid, cfg):
    from .pgroup import lemma_sweep, max_elementary_abelian, psp4_commutator_check
    if cfg.prime != 2:
        return [(sid, "lemma-sweep", PRECONDITION, {"reason": "the lemmas concern 2-groups"})]
    S = p_group_of(sid, 2)
    out = []
    for t in lemma_sweep(S):
        w = {"order": S.n, "instances": t.instances, "hypothesis": t.hypothesis,
             "precondition": t.precondition, "failures": len(t.failures)}
        v = FAIL if t.failures else PASS if t.instances else PRECONDITION
        out.append((sid, t.lemma, v, w))
    if sid.startswith("builtin:psp4:") and int(sid.rsplit(":", 1)[1]) in (4, 8, 16):
        b = int(sid.rsplit(":", 1)[1]).bit_length() - 1
        for name, A in zip("AB", max_elementary_abelian(S, 2)):
            rep = psp4_commutator_check(S, A, b)
            w = {"b": b, "subgroup": name, "derived": rep.derived_order, "checked": rep.checked,
                 "skipped": rep.skipped, "failures": len(rep.failures)}
            out.append((sid, f"psp4-commutator-{name}", _verdict(rep.ok), w))
    return out


def _fusion_entries(sid, cfg):
    from .fusion import (build_fusion, classify_known, essential_subgroups, focal_subgroup,
                         focal_via_ambient, fusion_of, is_normal_in_F, is_parabolic_char_p,
                         largest_normal_subgroup, op_subsystem, quotient_system, saturation_audit,
                         strongly_closed, subsystem_isomorphic, verify_alperin_goldschmidt)
    from .group import SubgroupHandle, center, centralizer
    from .pgroup import nilpotency_class, omega1
    F = build_fusion(sid, cfg.prime)
    S = F.S
    out = []

    def add(op, fn):
        try:
            out.append((sid, op) + fn())
        except ResourceError as exc:
            out.append((sid, op, SKIPPED, {"reason": str(exc)}))

    def audit():
        rep = saturation_audit(F)
        return _verdict(rep.passed), {"classes": rep.classes, "morphisms": rep.morphisms,
                                      "failures": len(rep.failures)}

    def ag():
        rep = verify_alperin_goldschmidt(F, budget=cfg.budget_closure)
        return _verdict(rep.holds), {"checked": rep.checked, "generators": rep.generators,
                                     "mismatches": len(rep.mismatches)}

    def essentials():
        ess = essential_subgroups(F)
        shape = sorted((r.subgroup.order, len(r.members)) for r in ess)
        want = EXPECTED_ESSENTIALS.get(sid)
        ok = want is None or (len(ess) == want[0] and all(r.subgroup.order == want[1] for r in ess))
        return _verdict(ok), {"classes": len(ess), "orders": [o for o, _ in shape],
                              "class-sizes": [c for _, c in shape]}

    def centric_radical():
        ess = essential_subgroups(F)
        ok = all(r.centric and r.radical for r in ess)
        return _verdict(ok, bool(ess)), {"essentials": len(ess)}

    def focal():
        a, b = focal_subgroup(F), focal_via_ambient(F)
        return _verdict(a == b), {"focal": a.order, "S-meet-derived": b.order}

    def normal_closed():
        if S.n > 64:
            return PRECONDITION, {"reason": "support order above 64"}
        count, bad = 0, 0
        for Q in F.subgroups:
            if not Q.is_abelian():
                continue
            count += 1
            bad += strongly_closed(F, Q) != is_normal_in_F(F, Q)
        return _verdict(bad == 0), {"abelian-subgroups": count, "mismatches": bad}

    def core():
        c = largest_normal_subgroup(F)
        return PASS, {"order": c.order}

    def parabolic():
        val = is_parabolic_char_p(F)
        want = EXPECTED_PARABOLIC.get(sid)
        c = largest_normal_subgroup(F).order
        ok = want is None or (val == want and c == 1)
        return _verdict(ok), {"parabolic": bool(val), "O_p": c}

    def known():
        rep = classify_known(F)
        want = EXPECTED_KNOWN.get(sid)
        ok = (want is None or rep.tag == want) and all(rep.notes.get(k, True) is not False
                                                       for k in rep.notes)
        w = {"tag": rep.tag, "shape": rep.shape}
        w.update({k: v for k, v in rep.notes.items() if isinstance(v, (bool, int, str))})
        return _verdict(ok), w

    def iso_psl32():
        cert = subsystem_isomorphic(F, fusion_of("builtin:psl3:2", cfg.prime))
        return _verdict(cert is not None), {"method": cert.method if cert else None}

    def o2_alt6():
        O, T = op_subsystem(F)
        cert = subsystem_isomorphic(O, fusion_of("builtin:alt:6", cfg.prime))
        return _verdict(cert is not None and T.order == 8), {"support": T.order,
                                                            "method": cert.method if cert else None}

    def essential_structure():
        if S.whole().is_abelian() or nilpotency_class(S) != 2:
            return PRECONDITION, {"reason": "S does not have class two"}
        ess = essential_subgroups(F)
        whole, bad = F.whole, 0
        for r in ess:
            E = r.subgroup
            Z = center(S, E)
            A = F.aut(E)
            rows = A.rows_of(A.o_p_prime)
            moved = set(np.unique(S.table[S.inverses[E.members][None, :], rows]).tolist())
            ok = (E.is_normal_in(whole) and moved <= set(Z.members.tolist())
                  and centralizer(S, Z) == E)
            bad += not ok
        return _verdict(bad == 0, bool(ess)), {"essentials": len(ess), "violations": bad}

    def central_quotient():
        A = F.ambient
        Zs = center(S)
        sm = F.sylow.members
        zc = [int(i) for i in Zs.members if (A.conj_all(int(sm[i])) == sm[i]).all()]
        Z = SubgroupHandle(S, zc)
        ok1 = nilpotency_class(S) == 2
        ok2 = omega1(S, 2).order == S.n
        Q = quotient_system(F, Z)
        cert = subsystem_isomorphic(Q, fusion_of("builtin:psl3:4", cfg.prime))
        return _verdict(ok1 and ok2 and cert is not None and Z.order == 4), {
            "sylow": S.n, "class": nilpotency_class(S), "omega1": omega1(S, 2).order,
            "center": Z.order, "quotient-iso-PSL3(4)": cert is not None}

    add("saturation-audit", audit)
    add("alperin-goldschmidt", ag)
    add("essentials", essentials)
    add("essential-centric-radical", centric_radical)
    add("essential-structure", essential_structure)
    add("focal", focal)
    add("abelian-strongly-closed-iff-normal", normal_closed)
    add("O_p", core)
    add("known-classification", known)
    if sid in EXPECTED_PARABOLIC or S.n <= 64:
        add("parabolic-char-p", parabolic)
    if sid == "builtin:alt:6":
        add("iso-PSL3(2)", iso_psl32)
    if sid == "builtin:sym:6":
        add("O^p-iso-Alt(6)", o2_alt6)
    if sid.endswith("2x2.psl3_4.perm"):
        add("central-quotient", central_quotient)
    return out


def _gg_entries(sid, cfg):
    from .fusion import gg_classify
    rep = gg_classify(sid, cfg.prime)
    want = EXPECTED_GG.get(sid)
    w = {"tag": rep.tag, "sylow": rep.sylow_order, "class": rep.nilpotency_class,
         "shape": rep.shape, "cross-check": rep.cross_check}
    if want is not None:
        v = _verdict(rep.tag == want and rep.cross_check is not False)
    elif rep.tag == "unclassified":
        v = PRECONDITION
    else:
        v = _verdict(rep.cross_check is not False)
    return [(sid, "gg-tag", v, w)]


def _extension_entries(sid, cfg):
    from .catalog import default_catalog
    from .extensions import (catalog_extension_count, enumerate_extensions,
                             l34_search_by_catalog, l34_search_by_extensions)
    from .pgroup import recognize_shape
    P = p_group_of(sid, cfg.prime)
    out = []
    try:
        a = len(enumerate_extensions(P, 1, cfg.prime))
    except ResourceError as exc:
        return [(sid, "extension-count", SKIPPED, {"reason": str(exc)})]
    if cfg.prime == 2 and 2 * P.n <= 64:
        b = len(catalog_extension_count(default_catalog(), P))
        out.append((sid, "extension-count", _verdict(a == b), {"extensions": a, "catalog": b}))
    else:
        out.append((sid, "extension-count", PRECONDITION, {"extensions": a}))
    if cfg.prime == 2 and P.n == 8 and recognize_shape(P) == "dihedral8":
        x = [e.vector for e in l34_search_by_extensions()]
        c = [list(e.id) for e in l34_search_by_catalog(default_catalog())]
        out.append((sid, "l34-order16-search", _verdict(not x and not c),
                    {"by-extensions": len(x), "by-catalog": len(c)}))
    return out


SUITE_RUNNERS = {"lemmas": _lemma_entries, "fusion": _fusion_entries, "gg": _gg_entries,
                 "extensions": _extension_entries}


def _run_group(args):
    """All entries for one group; runs in a worker process when jobs > 1."""
    sid, cfg = args
    from .fusion import system
    system.CLOSURE_BUDGET = cfg.budget_closure
    t0 = time.perf_counter()
    try:
        group_order(sid, cfg.budget_elements)
        rows = SUITE_RUNNERS[cfg.suite](sid, cfg)
    except ResourceError as exc:
        rows = [(sid, "build", SKIPPED, {"reason": str(exc)})]
    ms = int(1000 * (time.perf_counter() - t0))
    return [ReportEntry(s, op, v, _jsonable(w), ms) for s, op, v, w in rows]


def _rv_entry(cfg):
    from .rvmodel import rv_model_check
    sid, op = "rv-model:7^2:SL2(7):2", "automorphism-count"
    if cfg.budget_elements < RV_MODEL_ELEMENTS:
        return ReportEntry(sid, op, SKIPPED, {"reason": f"needs budget-elements >= {RV_MODEL_ELEMENTS}"})
    t0 = time.perf_counter()
    r = rv_model_check(RV_MODEL_ELEMENTS)
    w = {"order": r.order, "center": r.center_order, "automorphisms": r.automorphisms,
         "AGL2(7)": r.affine_normalizer, "centralizer": r.affine_centralizer,
         "normalized": r.normalized}
    return ReportEntry(sid, op, _verdict(r.ok), w, int(1000 * (time.perf_counter() - t0)))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return x.item()
    return x


def run_suite(cfg: SuiteConfig):
    groups = expand_groups(cfg.groups)
    work = [(g, cfg) for g in groups]
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(_run_group, work))
    else:
        chunks = [_run_group(w) for w in work]
    entries = [e for c in chunks for e in c]
    if cfg.rv_model:
        entries.append(_rv_entry(cfg))
    entries.sort(key=lambda e: (e.systemId, e.operation))
    return entries


def summarize(entries):
    s = {"pass": 0, "fail": 0, "skipped": 0}
    for e in entries:
        s["pass" if e.verdict == PASS else "fail" if e.verdict == FAIL else "skipped"] += 1
    return s


def render(entries, fmt="json", cfg: SuiteConfig = None):
    timings = bool(cfg and cfg.timings)
    if fmt == "json":
        doc = {"version": __version__, "config-echo": cfg.echo() if cfg else {},
               "entries": [e.as_dict(timings) for e in entries], "summary": summarize(entries)}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    lines = []
    for e in entries:
        w = " ".join(f"{k}={json.dumps(v, sort_keys=True)}" for k, v in sorted(e.witness.items()))
        t = f" ms={e.elapsedMillis}" if timings else ""
        lines.append(f"{e.verdict:<22} {e.systemId} {e.operation} {w}{t}".rstrip())
    s = summarize(entries)
    lines.append(f"summary pass={s['pass']} fail={s['fail']} skipped={s['skipped']}")
    return "\n".join(lines) + "\n"


def emit_report(entries, path, fmt="json", cfg: SuiteConfig = None):
    text = render(entries, fmt, cfg)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


def _parser():
    ap = argparse.ArgumentParser(prog="fusionkit", description="Fusion-system verification suites.")
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite")
    v.add_argument("--group", action="append", help="builtin:<family>:<param>, file:<path>, "
                   "catalog-upto:N or extras:lemmas; repeatable")
    v.add_argument("--prime", type=int)
    v.add_argument("--out")
    v.add_argument("--format")
    v.add_argument("--budget-elements", type=int)
    v.add_argument("--budget-closure", type=int)
    v.add_argument("--config")
    v.add_argument("--jobs", type=int)
    v.add_argument("--rv-model", action="store_true", help="also count Aut(7^2:SL2(7):2)")
    v.add_argument("--timings", action="store_true", help="record elapsedMillis (breaks byte-identity)")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = build_config(args)
        entries = run_suite(cfg)
        emit_report(entries, cfg.out, cfg.format, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ResourceError, MemoryError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    return 1 if summarize(entries)["fail"] else 0


if __name__ == "__main__":
    sys.exit(main())
