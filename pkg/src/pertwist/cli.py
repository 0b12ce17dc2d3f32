"""Command-line interface.

Commands: ``algebra-check``, ``resolve``, ``periodicity``, ``twist``,
``compose``, ``inverse``, ``tilt``, ``circle``, ``verify-all``.  Every
command reads either ``--fixture NAME`` or ``--file PATH`` (the sectioned
text format of :mod:`pertwist.io`), runs with an explicit ``--seed``
(default 0), and emits a text or JSON report; identical jobs produce
byte-identical JSON.

Exit codes: 0 all checks pass; 1 verification failure; 2 input error;
3 searches exhausted their budget leaving undetermined verdicts.
"""

from __future__ import annotations

import dataclasses
import re
import sys
from typing import Optional

import click
import numpy as np

from .algebra import Algebra, AlgebraError, NoSymmetricFormError
from .blocks import BlockComplex, homotopy_equivalent_blocks
from .fixtures import (a2_te_algebra, brauer_line_3_algebra, kq8_algebra,
                       kxn_algebra)
from .io import InputError, algebra_to_dict, parse_algebra_file
from .linalg import Field
from .modules import IsoKind, Module, cover_kernel, projective_cover
from .periodicity import (DepthExceeded, NotCertified, PeriodicityError,
                          bimodule_resolution, certify_twisted_periodicity,
                          simple_screen, verify_truncated)
from .reports import EXIT_FAIL, EXIT_INPUT, EXIT_UNDETERMINED, Report, emit
from .tilting import (AlgebraIsoKind, BadSubset, TiltingError, circle_vs_twist,
                      iterate, tilt_step)
from .twist import (AlgebraMismatch, NotSymmetricError, TwistError,
                    build_twist, composite_complex, compose_twists,
                    inverse_twist, verify_twist)

FIXTURE_PATTERNS = """\
kx2_p{p}            dual numbers k[x]/(x^2) over F_p
kxn_p{p}_n{n}       truncated polynomials k[x]/(x^(n+1)) over F_p
a2_te_p{p}          two-vertex symmetric Nakayama ring over F_p
brauer_line_3_p{p}  three-vertex line algebra over F_p
kq8_p2              group algebra of the quaternion group over F_2"""

BUNDLED = ["kx2_p2", "kx2_p3", "a2_te_p2", "a2_te_p3",
           "brauer_line_3_p2", "brauer_line_3_p3", "kq8_p2"]


def fixture_algebra(name: str) -> Algebra:
    m = re.fullmatch(r"kx2_p(\d+)", name)
    if m:
        return kxn_algebra(Field(int(m.group(1))), 1)
    m = re.fullmatch(r"kxn_p(\d+)_n(\d+)", name)
    if m:
        return kxn_algebra(Field(int(m.group(1))), int(m.group(2)))
    m = re.fullmatch(r"a2_te_p(\d+)", name)
    if m:
        return a2_te_algebra(Field(int(m.group(1))))
    m = re.fullmatch(r"brauer_line_3_p(\d+)", name)
    if m:
        return brauer_line_3_algebra(Field(int(m.group(1))))
    if name == "kq8_p2":
        return kq8_algebra(Field(2))
    raise InputError(f"unknown fixture {name!r}; available patterns:\n"
                     + FIXTURE_PATTERNS, path="<fixture>")


def _load(fixture: Optional[str], file_: Optional[str]
          ) -> tuple[dict, str, Algebra]:
    if (fixture is None) == (file_ is None):
        raise click.UsageError("give exactly one of --fixture or --file")
    if fixture is not None:
        try:
            return {"fixture": fixture}, fixture, fixture_algebra(fixture)
        except ValueError as exc:  # bad characteristic inside the name
            raise InputError(f"fixture {name_or(fixture)}: {exc}",
                             path="<fixture>") from exc
    name, alg = parse_algebra_file(file_)
    return {"file": file_}, name, alg


def name_or(x):
    return repr(x)


def _parse_j(a: Algebra, text: Optional[str], required: bool = True
             ) -> Optional[list[int]]:
    """Comma-separated vertex names (or 0-based indices as a fallback)."""
    if text is None:
        if required:
            raise click.UsageError("this command needs --J "
                                   "(comma-separated vertex names)")
        return None
    names = {v: i for i, v in enumerate(a.vertex_names)}
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            raise InputError("empty vertex in --J", path="<args>")
        if tok in names:
            out.append(names[tok])
        elif re.fullmatch(r"\d+", tok) and int(tok) < a.n_vertices:
            out.append(int(tok))
        else:
            raise InputError(
                f"unknown vertex {tok!r}; vertices are "
                f"{', '.join(a.vertex_names)}", path="<args>")
    return sorted(set(out))


def _parse_chain(a: Algebra, text: str) -> list[list[int]]:
    """Comma-separated twist steps, each a '+'-joined set of vertices."""
    steps = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise InputError("empty step in the comparison chain",
                             path="<args>")
        steps.append(_parse_j(a, part.replace("+", ",")))
    return steps


def _num(f: Field, x):
    return int(x) if f.p > 0 else f.to_str(x)


def _mat_list(f: Field, arr: np.ndarray):
    return [[_num(f, x) for x in row] for row in arr]


def _vec_list(f: Field, arr: np.ndarray):
    return [_num(f, x) for x in arr]


def _block_summary(bc: BlockComplex) -> dict:
    return {"degrees": [int(d) for d in bc.degrees],
            "dims": {str(d): int(bc.dim(d)) for d in bc.degrees},
            "labels": {str(d): bc.labels(d) for d in bc.degrees}}


def _guard(body, report_fmt: str, out: Optional[str]) -> int:
    """Translate framework exceptions into the documented exit codes."""
    try:
        return body()
    except click.UsageError:
        raise
    except InputError as exc:
        click.echo(f"input error: {exc}", err=True)
        return EXIT_INPUT
    except (BadSubset, NotSymmetricError, AlgebraMismatch) as exc:
        click.echo(f"input error: {exc}", err=True)
        return EXIT_INPUT
    except (DepthExceeded, NotCertified) as exc:
        click.echo(f"undetermined: {exc}", err=True)
        return EXIT_UNDETERMINED
    except (TiltingError, TwistError, PeriodicityError,
            AlgebraError) as exc:
        click.echo(f"verification failure: {exc}", err=True)
        return EXIT_FAIL


def _std_opts(fn):
    for deco in (
        click.option("--fixture", help="bundled fixture name "
                     "(see 'pertwist fixtures')"),
        click.option("--file", "file_",
                     type=click.Path(exists=False, dir_okay=False),
                     help="algebra description file"),
        click.option("--seed", type=int, default=0, show_default=True,
                     help="seed for all randomized searches"),
        click.option("--out", type=click.Path(dir_okay=False), default=None,
                     help="write the report here instead of stdout"),
        click.option("--format", "fmt",
                     type=click.Choice(["text", "json"]), default="text",
                     show_default=True),
    ):
        fn = deco(fn)
    return fn


@click.group()
def main() -> None:
    """Exact-arithmetic certificates for periodic twists and tilts."""


@main.command("fixtures")
def cmd_fixtures() -> None:
    """List the bundled fixture name patterns."""
    click.echo(FIXTURE_PATTERNS)
    click.echo("\nbundled set: " + ", ".join(BUNDLED))


# ----------------------------------------------------------------------
# algebra-check
# ----------------------------------------------------------------------

def _algebra_checks(a: Algebra) -> list[tuple[str, bool, str]]:
    f = a.field
    checks = []
    try:
        a.validate_associativity()
        checks.append(("associativity", True, f"{a.dim}^3 products"))
    except AlgebraError as exc:
        checks.append(("associativity", False, str(exc)))
    unit_ok = all(
        bool(f.equal(a.multiply(a.unit, a.basis_vector(i)),
                     a.basis_vector(i)))
        and bool(f.equal(a.multiply(a.basis_vector(i), a.unit),
                         a.basis_vector(i)))
        for i in range(a.dim))
    checks.append(("two-sided unit", unit_ok, ""))
    idem_ok = True
    note = ""
    for v in range(a.n_vertices):
        e = a.idempotent_vector(v)
        if not bool(f.equal(a.multiply(e, e), e)):
            idem_ok, note = False, f"vertex {v} fails e*e = e"
            break
    checks.append(("vertex idempotents", idem_ok, note))
    return checks


@main.command("algebra-check")
@_std_opts
def cmd_algebra_check(fixture, file_, seed, out, fmt):
    """Validate an algebra and search for its symmetrizing form."""
    def body():
        source, name, a = _load(fixture, file_)
        rep = Report("algebra-check", source, {"seed": seed})
        rep.payload["algebra"] = algebra_to_dict(a, name)
        rep.add("structure", _algebra_checks(a))
        f = a.field
        try:
            lam, gram, _ = a.symmetric_structure()
            rep.payload["symmetric"] = True
            rep.payload["form"] = _vec_list(f, lam)
            rep.payload["gram"] = _mat_list(f, gram)
        except NoSymmetricFormError as exc:
            rep.payload["symmetric"] = False
            rep.payload["symmetric_note"] = str(exc)
        return emit(rep, fmt, out, click.echo)
    sys.exit(_guard(body, fmt, out))


# ----------------------------------------------------------------------
# resolve
# ----------------------------------------------------------------------

@main.command("resolve")
@_std_opts
@click.option("--max-period", type=int, default=6, show_default=True,
              help="resolution depth / screening bound")
def cmd_resolve(fixture, file_, seed, out, fmt, max_period):
    """Minimal resolutions: one-sided for every simple, and the bimodule
    resolution of the algebra itself."""
    def body():
        source, name, a = _load(fixture, file_)
        rep = Report("resolve", source,
                     {"seed": seed, "max_period": max_period})
        rep.payload["algebra"] = {"name": name, "dim": a.dim,
                                  "field": a.field.p}
        screen = simple_screen(a, max_period)
        simples = {}
        for v in range(a.n_vertices):
            cur = Module.simple(a, v)
            cover_dims, syzygy_dims = [], []
            for _ in range(max_period):
                kmod, cover, _ = cover_kernel(cur)
                cover_dims.append(int(cover.dim))
                syzygy_dims.append(int(kmod.dim))
                if kmod.dim == 0:
                    break
                cur = kmod
            simples[a.vertex_names[v]] = {
                "cover_dims": cover_dims,
                "syzygy_dims": syzygy_dims,
                "repeat_period": screen[v],
            }
        rep.payload["simples"] = simples
        bim = bimodule_resolution(a, max_period)
        rep.payload["bimodule"] = _block_summary(bim.y)
        rep.add("construction", [
            ("one-sided resolutions computed", True,
             f"{a.n_vertices} simples to depth {max_period}"),
            ("bimodule resolution computed", True,
             f"terms in degrees {bim.y.degrees}"),
        ])
        return emit(rep, fmt, out, click.echo)
    sys.exit(_guard(body, fmt, out))


# ----------------------------------------------------------------------
# periodicity
# ----------------------------------------------------------------------

def _corrupt_resolution(r, spec: str):
    """Return a copy of the certified data with one differential block
    deleted.  Minimal resolutions carry no superfluous components, so the
    damaged complex fails exactness."""
    m = re.fullmatch(r"(-?\d+):(\d+):(\d+)", spec.strip())
    if not m:
        raise InputError("--corrupt-differential wants DEG:ROW:COL",
                         path="<args>")
    deg, row, col = (int(m.group(k)) for k in (1, 2, 3))
    y = r.y
    if deg not in y.blocks or (row, col) not in y.blocks[deg]:
        have = {d: sorted(bb) for d, bb in y.blocks.items()}
        raise InputError(
            f"no nonzero block at degree {deg}, pair ({row}, {col}); "
            f"nonzero blocks: {have}", path="<args>")
    blocks = {d: dict(bb) for d, bb in y.blocks.items()}
    del blocks[deg][(row, col)]
    terms = {d: list(y.summands(d)) for d in y.degrees}
    y2 = BlockComplex(y.ring, terms, blocks, check=False)
    return dataclasses.replace(r, y=y2), (deg, row, col)


@main.command("periodicity")
@_std_opts
@click.option("--max-period", type=int, default=8, show_default=True)
@click.option("--budget", type=int, default=200, show_default=True)
@click.option("--corrupt-differential", default=None, metavar="DEG:ROW:COL",
              help="deliberately damage one block after certification, "
                   "then re-verify (negative control)")
def cmd_periodicity(fixture, file_, seed, out, fmt, max_period, budget,
                    corrupt_differential):
    """Certify twisted periodicity of the algebra's bimodule resolution."""
    def body():
        source, name, a = _load(fixture, file_)
        params = {"seed": seed, "max_period": max_period, "budget": budget}
        if corrupt_differential:
            params["corrupt_differential"] = corrupt_differential
        rep = Report("periodicity", source, params)
        r = certify_twisted_periodicity(a, max_period, seed=seed,
                                        budget=budget)
        rep.payload["period"] = r.period
        rep.payload["sigma_vertex_action"] = [
            a.vertex_names[j] for j in r.sigma_perm]
        rep.payload["sigma_matrix"] = _mat_list(a.field, r.sigma)
        rep.payload["resolution"] = _block_summary(r.y)
        rep.payload["log"] = list(r.log)
        rep.add("certification", [
            ("twisted period found within bound", True,
             f"period {r.period}, vertex action {r.sigma_perm}")])
        target, where = r, None
        if corrupt_differential:
            target, where = _corrupt_resolution(r, corrupt_differential)
            rep.payload["corrupted_at"] = {
                "degree": where[0], "row": where[1], "col": where[2]}
        ver = verify_truncated(target, seed=seed)
        title = ("verification after corrupting block "
                 f"{where}" if where else "verification")
        rep.add(title, ver.checks)
        return emit(rep, fmt, out, click.echo)
    sys.exit(_guard(body, fmt, out))


# ----------------------------------------------------------------------
# twist
# ----------------------------------------------------------------------

def _parse_force_sigma(a: Algebra, J: list[int],
                       text: Optional[str]) -> Optional[dict[int, int]]:
    if text is None:
        return None
    raw = [t.strip() for t in text.split(",")]
    names = {v: i for i, v in enumerate(a.vertex_names)}
    imgs = []
    for tok in raw:
        if tok in names:
            imgs.append(names[tok])
        elif re.fullmatch(r"\d+", tok) and int(tok) < a.n_vertices:
            imgs.append(int(tok))
        else:
            raise InputError(f"unknown vertex {tok!r} in --force-sigma",
                             path="<args>")
    if len(imgs) != len(J):
        raise InputError(
            f"--force-sigma needs {len(J)} images for the chosen vertices "
            f"{[a.vertex_names[j] for j in J]}", path="<args>")
    return dict(zip(J, imgs))


@main.command("twist")
@_std_opts
@click.option("--J", "j_text", default=None, metavar="V1,V2,...",
              help="chosen vertices (names)")
@click.option("--max-period", type=int, default=8, show_default=True)
@click.option("--budget", type=int, default=200, show_default=True)
@click.option("--force-sigma", default=None, metavar="W1,W2,...",
              help="override the expected relabeling of the chosen "
                   "vertices (negative control)")
def cmd_twist(fixture, file_, seed, out, fmt, j_text, max_period, budget,
              force_sigma):
    """Build the two-sided complex at the chosen vertices and verify its
    autoequivalence contract."""
    def body():
        source, name, a = _load(fixture, file_)
        J = _parse_j(a, j_text)
        params = {"seed": seed, "J": [a.vertex_names[j] for j in J],
                  "max_period": max_period, "budget": budget}
        if force_sigma:
            params["force_sigma"] = force_sigma
        rep = Report("twist", source, params)
        t = build_twist(a, J, max_period=max_period, seed=seed,
                        budget=budget)
        rep.payload["period"] = t.period
        rep.payload["relabeling"] = {
            a.vertex_names[j]: a.vertex_names[t.perm[j]] for j in J}
        rep.payload["complex"] = _block_summary(t.x)
        force = _parse_force_sigma(a, J, force_sigma)
        ver = verify_twist(t, seed=seed, budget=budget, force_perm=force)
        rep.payload["object_dims"] = {
            k: {str(d): int(x) for d, x in v.items()} if isinstance(v, dict)
            else v for k, v in ver.dims.items()}
        rep.add("autoequivalence contract", ver.checks)
        return emit(rep, fmt, out, click.echo)
    sys.exit(_guard(body, fmt, out))


# ----------------------------------------------------------------------
# compose
# ----------------------------------------------------------------------

@main.command("compose")
@_std_opts
@click.option("--J", "j_text", required=False, metavar="V1,...",
              help="first twist (acts last)")
@click.option("--with-J", "with_text", default=None, metavar="V1,...",
              help="second twist")
@click.option("--then-J", "then_text", default=None, metavar="V1,...",
              help="third twist")
@click.option("--compare-J", "compare_text", default=None,
              metavar="S1,S2,...",
              help="comparison chain; steps separated by commas, vertices "
                   "inside one step joined by '+'")
@click.option("--max-period", type=int, default=8, show_default=True)
@click.option("--budget", type=int, default=200, show_default=True)
def cmd_compose(fixture, file_, seed, out, fmt, j_text, with_text,
                then_text, compare_text, max_period, budget):
    """Compose twists: splice-vs-tensor certificates and chain
    comparisons."""
    def body():
        source, name, a = _load(fixture, file_)
        if j_text is None:
            raise click.UsageError("compose needs --J")
        chain = [_parse_j(a, j_text)]
        if with_text is not None:
            chain.append(_parse_j(a, with_text))
        if then_text is not None:
            if with_text is None:
                raise click.UsageError("--then-J needs --with-J")
            chain.append(_parse_j(a, then_text))
        params = {"seed": seed, "budget": budget, "max_period": max_period,
                  "chain": [[a.vertex_names[v] for v in J] for J in chain]}
        rep = Report("compose", source, params)

        cache: dict[tuple[int, ...], object] = {}

        def tw(J):
            key = tuple(J)
            if key not in cache:
                cache[key] = build_twist(a, J, max_period=max_period,
                                         seed=seed, budget=budget)
            return cache[key]

        twists = [tw(J) for J in chain]
        if len(twists) >= 2 and chain[0] == chain[1]:
            tc, crep = compose_twists(twists[0], twists[1])
            rep.add("splice against tensor (first two)", crep.checks)
            rep.payload["spliced_period"] = tc.period
        acc = composite_complex(twists)
        rep.payload["composite"] = _block_summary(acc)
        if compare_text is not None:
            other_chain = _parse_chain(a, compare_text)
            params["compare_chain"] = [[a.vertex_names[v] for v in J]
                                       for J in other_chain]
            others = [tw(J) for J in other_chain]
            occ = composite_complex(others)
            rep.payload["comparison"] = _block_summary(occ)
            res = homotopy_equivalent_blocks(acc, occ, seed=seed,
                                             budget=budget)
            okk = res.kind is IsoKind.ISO
            rep.add("chain comparison", [
                ("composites homotopy equivalent", okk,
                 res.obstruction or "witness found")])
            if res.kind is IsoKind.UNDETERMINED:
                rep.mark_undetermined(
                    "chain comparison exhausted its budget")
        return emit(rep, fmt, out, click.echo)
    sys.exit(_guard(body, fmt, out))


# ----------------------------------------------------------------------
# inverse
# ----------------------------------------------------------------------

@main.command("inverse")
@_std_opts
@click.option("--J", "j_text", default=None, metavar="V1,...")
@click.option("--max-period", type=int, default=8, show_default=True)
@click.option("--budget", type=int, default=200, show_default=True)
def cmd_inverse(fixture, file_, seed, out, fmt, j_text, max_period, budget):
    """Build the inverse complex from the reversed resolution and certify
    it against the dual."""
    def body():
        source, name, a = _load(fixture, file_)
        J = _parse_j(a, j_text)
        params = {"seed": seed, "J": [a.vertex_names[j] for j in J],
                  "max_period": max_period, "budget": budget}
        rep = Report("inverse", source, params)
        t = build_twist(a, J, max_period=max_period, seed=seed,
                        budget=budget)
        xprime, crep = inverse_twist(t)
        rep.payload["period"] = t.period
        rep.payload["inverse_complex"] = _block_summary(xprime)
        rep.add("inverse contract", crep.checks)
        return emit(rep, fmt, out, click.echo)
    sys.exit(_guard(body, fmt, out))


# ----------------------------------------------------------------------
# tilt / circle
# ----------------------------------------------------------------------

@main.command("tilt")
@_std_opts
@click.option("--J", "j_text", default=None, metavar="V1,...")
def cmd_tilt(fixture, file_, seed, out, fmt, j_text):
    """One combinatorial tilt: complex, certificates, and the new
    endomorphism algebra."""
    def body():
        source, name, a = _load(fixture, file_)
        J = _parse_j(a, j_text)
        params = {"seed": seed, "J": [a.vertex_names[j] for j in J]}
        rep = Report("tilt", source, params)
        st = tilt_step(a, J)
        rep.payload["step"] = st.to_dict()
        rep.payload["target"] = algebra_to_dict(st.target)
        rep.add("tilting certificates", st.tilting.report.checks)
        return emit(rep, fmt, out, click.echo)
    sys.exit(_guard(body, fmt, out))


@main.command("circle")
@_std_opts
@click.option("--J", "j_text", default=None, metavar="V1,...")
@click.option("--steps", type=int, required=True,
              help="number of tilt steps before comparing to the start")
@click.option("--budget", type=int, default=20000, show_default=True,
              help="isomorphism search budget")
@click.option("--max-period", type=int, default=8, show_default=True)
@click.option("--vs-twist", is_flag=True,
              help="also certify agreement with the bimodule twist")
@click.option("--claim-period", type=int, default=None,
              help="override the certified period in the tilt-vs-twist "
                   "syzygy comparison (negative control)")
def cmd_circle(fixture, file_, seed, out, fmt, j_text, steps, budget,
               max_period, vs_twist, claim_period):
    """Iterate the combinatorial tilt and test whether the cycle closes."""
    def body():
        source, name, a = _load(fixture, file_)
        J = _parse_j(a, j_text)
        params = {"seed": seed, "J": [a.vertex_names[j] for j in J],
                  "steps": steps, "budget": budget}
        if claim_period is not None:
            params["claim_period"] = claim_period
        rep = Report("circle", source, params)
        run = iterate(a, J, steps, budget=budget, seed=seed)
        rep.payload["run"] = run.to_dict()
        v = run.verdict
        if v.witness is not None:
            rep.payload["witness"] = _mat_list(a.field, v.witness)
        okk = v.kind is AlgebraIsoKind.ISOMORPHIC
        detail = v.detail or v.obstruction
        if v.permutation is not None:
            detail += f"; vertex map {v.permutation}"
        rep.add("cycle verdict", [
            (f"algebra after {steps} step(s) is isomorphic to the start",
             okk, f"{v.kind.value}: {detail}")])
        if v.kind is AlgebraIsoKind.INVARIANTS_MATCH:
            rep.mark_undetermined("isomorphism search ran out of budget; "
                                  "invariants all agree")
        if vs_twist or claim_period is not None:
            from .twist import endomorphism_setup
            ed = endomorphism_setup(a, J)
            r = certify_twisted_periodicity(ed.endo, max_period, seed=seed)
            agree = circle_vs_twist(a, J, r, claim_period=claim_period,
                                    seed=seed)
            rep.payload["corner_period"] = r.period
            rep.add("agreement with the bimodule twist", agree.checks)
        return emit(rep, fmt, out, click.echo)
    sys.exit(_guard(body, fmt, out))


# ----------------------------------------------------------------------
# verify-all
# ----------------------------------------------------------------------

def _battery(rep: Report, name: str, a: Algebra, seed: int,
             budget: int, max_period: int) -> None:
    rep.add(f"{name}: structure", _algebra_checks(a))
    if a.n_vertices == 1:
        r = certify_twisted_periodicity(a, max_period, seed=seed,
                                        budget=budget)
        rep.payload.setdefault("periods", {})[name] = r.period
        rep.add(f"{name}: periodicity (period {r.period})",
                verify_truncated(r, seed=seed).checks)
        J = [0]
        steps = None
    else:
        J = [0, 1] if a.n_vertices == 3 else [0]
        steps = 2 if len(J) == 2 else 1
    t = build_twist(a, J, max_period=max_period, seed=seed, budget=budget)
    rep.payload.setdefault("twist_periods", {})[name] = t.period
    jn = "+".join(a.vertex_names[j] for j in J)
    rep.add(f"{name}: twist at {jn}",
            verify_twist(t, seed=seed, budget=budget).checks)
    _, crep = inverse_twist(t)
    rep.add(f"{name}: inverse at {jn}", crep.checks)
    if steps is not None:
        run = iterate(a, J, steps, seed=seed)
        okk = run.verdict.kind is AlgebraIsoKind.ISOMORPHIC
        rep.add(f"{name}: tilt cycle at {jn}", [
            (f"closes after {steps} step(s)", okk,
             run.verdict.kind.value)])
        if run.verdict.kind is AlgebraIsoKind.INVARIANTS_MATCH:
            rep.mark_undetermined(f"{name}: cycle verdict undetermined")
        agree = circle_vs_twist(a, J, t.resolution, twist=t, seed=seed)
        rep.add(f"{name}: tilt against twist at {jn}", agree.checks)


@main.command("verify-all")
@_std_opts
@click.option("--budget", type=int, default=200, show_default=True)
@click.option("--max-period", type=int, default=8, show_default=True)
def cmd_verify_all(fixture, file_, seed, out, fmt, budget, max_period):
    """Run the full certificate battery on one algebra, or on every
    bundled fixture when no source is given."""
    def body():
        params = {"seed": seed, "budget": budget, "max_period": max_period}
        if fixture is None and file_ is None:
            rep = Report("verify-all", {"fixture": "ALL"}, params)
            for fname in BUNDLED:
                _battery(rep, fname, fixture_algebra(fname), seed, budget,
                         max_period)
        else:
            source, name, a = _load(fixture, file_)
            rep = Report("verify-all", source, params)
            _battery(rep, name, a, seed, budget, max_period)
        return emit(rep, fmt, out, click.echo)
    sys.exit(_guard(body, fmt, out))


if __name__ == "__main__":
    main()
