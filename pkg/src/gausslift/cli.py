"""Command-line front door.

Subcommands: compose, lift, phase, verify, sweep-time, sweep-grid, fermion.
Inputs arrive as a JSON document (``--input`` file or ``-`` for stdin) plus
flags; sweeps emit CSV with floats at 17 significant digits, single results
emit JSON.  Angles in files are radians; degrees are accepted at the flag
level with an explicit ``deg`` suffix only.

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 numerical-domain
error.
"""

import argparse
import json
import sys

import numpy as np

from .errors import GaussLiftError, InputError, NumericalDomainError
from .fermion import (
    build_majorana,
    fermion_vacuum_amplitude,
    mw_reflection,
    normalize_reflection,
    pin_component_phase,
    reference_reflection,
    so_generator,
)
from .fock import (
    build_fock,
    number_expectation,
    number_expectation_analytic,
    truncation_reliable_pair,
    vacuum_amplitude_gqh,
    zeta_numeric,
)
from .generator import QuadraticHamiltonian, gqh_overlap_analytic, lift_from_gqh, z_from_hf
from .inhomogeneous import LiftedGaussian, ig_multiply, zeta_cocycle
from .matfunc import complex_det, mat_exp, wrap_angle
from .phase_space import Species, split_cd, standard_kahler, validate_group_element

_FLOAT_FMT = "%.17g"


def _fmt(x):
    return _FLOAT_FMT % float(x)


def _complex_pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _fail(code, kind, message):
    doc = {"error": {"code": kind, "message": message}}
    sys.stderr.write(json.dumps(doc) + "\n")
    return code


def _load_document(path):
    if path is None:
        return {}
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"input is not valid JSON: {exc}") from exc
    except OSError as exc:
        raise InputError(f"cannot read input: {exc}") from exc


def _require(doc, key, kind=None):
    if key not in doc:
        raise InputError(f"input document lacks required field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise InputError(f"field {key!r} has wrong type")
    return value


def _parse_species(doc):
    name = doc.get("species", "boson")
    try:
        return Species(name)
    except ValueError:
        raise InputError(f"unknown species {name!r}") from None


def _parse_matrix(obj, n2, name):
    m = np.asarray(obj, dtype=float)
    if m.shape != (n2, n2):
        raise InputError(f"{name} must be a {n2}x{n2} row-major matrix")
    return m


def _parse_vector(obj, n2, name):
    v = np.asarray(obj, dtype=float)
    if v.shape != (n2,):
        raise InputError(f"{name} must be a length-{n2} vector")
    return v


def _parse_hamiltonians(doc, k, minimum=1):
    items = _require(doc, "hamiltonians", list)
    if len(items) < minimum:
        raise InputError(f"need at least {minimum} hamiltonian(s)")
    out = []
    for i, item in enumerate(items):
        h = _parse_matrix(_require(item, "h"), k.dim, f"hamiltonians[{i}].h")
        f = item.get("f")
        if f is not None:
            f = _parse_vector(f, k.dim, f"hamiltonians[{i}].f")
        out.append(
            QuadraticHamiltonian(h=h, f=f, c=float(item.get("c", 0.0)), species=k.species)
        )
    return out


def _parse_elements(doc, k):
    items = _require(doc, "elements", list)
    out = []
    for i, item in enumerate(items):
        m = _parse_matrix(_require(item, "M"), k.dim, f"elements[{i}].M")
        z = _parse_vector(item.get("z", [0.0] * k.dim), k.dim, f"elements[{i}].z")
        psi_raw = item.get("Psi", [1.0, 0.0])
        if not isinstance(psi_raw, (list, tuple)) or len(psi_raw) != 2:
            raise InputError(f"elements[{i}].Psi must be a [re, im] pair")
        out.append(LiftedGaussian(m=m, z=z, psi=complex(*psi_raw), k=k))
    return out


def _element_doc(u):
    return {
        "M": u.m.tolist(),
        "z": u.z.tolist(),
        "Psi": _complex_pair(u.psi),
    }


def _parse_angle(text):
    text = text.strip()
    if text.endswith("deg"):
        return float(text[:-3]) * np.pi / 180.0
    return float(text)


def _parse_nmax_list(value, default):
    if value is None:
        return list(default)
    return [int(v) for v in str(value).split(",") if v]


def _write_output(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(doc, out_path):
    _write_output(json.dumps(doc, indent=2), out_path)


def _emit_csv(header, rows, out_path):
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    _write_output("\n".join(lines) + "\n", out_path)


def _cmd_compose(args):
    doc = _load_document(args.input)
    species = _parse_species(doc)
    k = standard_kahler(int(_require(doc, "N")), species)
    elements = _parse_elements(doc, k)
    if not elements:
        raise InputError("compose needs at least one element")
    product = elements[0]
    for el in elements[1:]:
        product = ig_multiply(product, el)
    out = {
        "species": species.value,
        "N": k.n_modes,
        "elements": [_element_doc(product)],
    }
    if len(elements) == 2:
        out["zeta"] = zeta_cocycle(elements[0].m, elements[0].z, elements[1].m, elements[1].z, k)
    _emit_json(out, args.out)
    return 0


def _cmd_lift(args):
    doc = _load_document(args.input)
    species = _parse_species(doc)
    if species is not Species.BOSON:
        raise InputError("lift covers bosonic hamiltonians")
    k = standard_kahler(int(_require(doc, "N")), species)
    elements = []
    diagnostics = []
    for ham in _parse_hamiltonians(doc, k):
        lifted = lift_from_gqh(ham, k, steps=args.steps)
        _, residual = validate_group_element(lifted.m, k)
        elements.append(_element_doc(lifted))
        diagnostics.append(
            {
                "group_residual": residual,
                "psi_modulus_error": abs(abs(lifted.psi) - 1.0),
                "phase_method": "tracked",
            }
        )
    _emit_json(
        {"species": species.value, "N": k.n_modes, "elements": elements,
         "diagnostics": diagnostics},
        args.out,
    )
    return 0


def _cmd_phase(args):
    doc = _load_document(args.input)
    species = _parse_species(doc)
    k = standard_kahler(int(_require(doc, "N")), species)
    from .generator import vacuum_phase_stable, vacuum_phase_tracked

    results = []
    for ham in _parse_hamiltonians(doc, k):
        kgen = k.omega @ ham.h
        tracked = vacuum_phase_tracked(kgen, k, steps=args.steps)
        entry = {"phase_tracked": _complex_pair(tracked)}
        try:
            stable = vacuum_phase_stable(kgen, k)
            entry["phase_stable"] = _complex_pair(stable)
            entry["method_agreement"] = abs(stable - tracked)
        except GaussLiftError as exc:
            entry["phase_stable"] = None
            entry["stable_rejected"] = str(exc)
        results.append(entry)
    _emit_json({"species": species.value, "N": k.n_modes, "phases": results}, args.out)
    return 0


def _cmd_verify(args):
    doc = _load_document(args.input)
    species = _parse_species(doc)
    if species is not Species.BOSON:
        raise InputError("verify covers bosonic hamiltonians")
    k = standard_kahler(int(_require(doc, "N")), species)
    hams = _parse_hamiltonians(doc, k, minimum=2)
    h1, h2 = hams[0], hams[1]
    t = float(doc.get("t", args.t))
    nmax = _parse_nmax_list(args.nmax, [80])[-1]
    tol = args.tol
    rep = build_fock(k.n_modes, nmax)

    checks = []

    def record(name, deviation):
        checks.append({"check": name, "deviation": deviation, "pass": bool(deviation < tol)})

    m1 = mat_exp(k.omega @ h1.h * t)
    m2 = mat_exp(k.omega @ h2.h * t)
    z1 = z_from_hf(h1.h * t, h1.f_or_zero * t, k)
    z2 = z_from_hf(h2.h * t, h2.f_or_zero * t, k)
    zeta_a = wrap_angle(zeta_cocycle(m1, z1, m2, z2, k))
    zeta_n = zeta_numeric(h1, h2, t, rep)
    record("zeta", abs(wrap_angle(zeta_a - zeta_n)))
    record(
        "number_expectation",
        abs(number_expectation_analytic(h1, h2, t, k) - number_expectation(h1, h2, t, rep)),
    )
    for name, ham in (("U1", h1), ("U2", h2)):
        amp = vacuum_amplitude_gqh(ham.scaled(t), 1.0, rep)
        analytic = gqh_overlap_analytic(ham.scaled(t), k)
        record(f"{name}_phase", abs(wrap_angle(np.angle(analytic) - np.angle(amp))))
        record(f"{name}_modulus", abs(abs(analytic) - abs(amp)))
    reliable = truncation_reliable_pair(h1, h2, t, rep)
    verdict = all(c["pass"] for c in checks)
    _emit_json(
        {
            "species": species.value,
            "N": k.n_modes,
            "t": t,
            "n_max": nmax,
            "tol": tol,
            "reliable": bool(reliable),
            "checks": checks,
            "verdict": "pass" if verdict else "fail",
        },
        args.out,
    )
    return 0 if verdict else 1


def _cmd_sweep_time(args):
    doc = _load_document(args.input)
    species = _parse_species(doc)
    if species is not Species.BOSON:
        raise InputError("time sweeps cover bosonic hamiltonians")
    k = standard_kahler(int(_require(doc, "N")), species)
    hams = _parse_hamiltonians(doc, k, minimum=2)
    h1, h2 = hams[0], hams[1]
    spec = doc.get("time", {})
    t_max = float(spec.get("t_max", 10.0))
    t_step = float(spec.get("t_step", 0.05))
    if t_step <= 0 or t_max < 0:
        raise InputError("time grid needs t_step > 0 and t_max >= 0")
    nmax_list = _parse_nmax_list(args.nmax, spec.get("nmax", [80]))
    reps = {n: build_fock(k.n_modes, n) for n in nmax_list}
    steps = int(round(t_max / t_step))
    ts = [i * t_step for i in range(steps + 1)]

    header = ["t", "zeta_analytic"]
    header += [f"zeta_numeric_nmax{n}" for n in nmax_list]
    header += ["N_analytic"]
    header += [f"N_numeric_nmax{n}" for n in nmax_list]
    header += [f"reliable_nmax{n}" for n in nmax_list]

    rows = []
    for t in ts:
        m1 = mat_exp(k.omega @ h1.h * t)
        m2 = mat_exp(k.omega @ h2.h * t)
        z1 = z_from_hf(h1.h * t, h1.f_or_zero * t, k)
        z2 = z_from_hf(h2.h * t, h2.f_or_zero * t, k)
        row = [_fmt(t), _fmt(wrap_angle(zeta_cocycle(m1, z1, m2, z2, k)))]
        for n in nmax_list:
            row.append(_fmt(zeta_numeric(h1, h2, t, reps[n])))
        row.append(_fmt(number_expectation_analytic(h1, h2, t, k)))
        for n in nmax_list:
            row.append(_fmt(number_expectation(h1, h2, t, reps[n])))
        for n in nmax_list:
            row.append(str(int(truncation_reliable_pair(h1, h2, t, reps[n]))))
        rows.append(row)

    if args.format == "json":
        docs = [dict(zip(header, row)) for row in rows]
        _emit_json({"species": species.value, "N": k.n_modes, "rows": docs}, args.out)
    else:
        _emit_csv(header, rows, args.out)
    return 0


def _cmd_sweep_grid(args):
    doc = _load_document(args.input)
    species = _parse_species(doc)
    if species is not Species.BOSON:
        raise InputError("grid sweeps cover bosonic hamiltonians")
    if int(_require(doc, "N")) != 1:
        raise InputError("the (a, c) grid sweep is a single-mode study")
    k = standard_kahler(1, species)
    spec = doc.get("grid", {})
    a_min, a_max, a_num = spec.get("a", [-2.0, 2.0, 9])
    c_min, c_max, c_num = spec.get("c", [-2.0, 2.0, 9])
    rho = float(spec.get("rho", 0.0)) if args.rho is None else float(args.rho)
    tau = float(spec.get("tau", 0.0)) if args.tau is None else _parse_angle(args.tau)
    a_vals = np.linspace(float(a_min), float(a_max), int(a_num))
    c_vals = np.linspace(float(c_min), float(c_max), int(c_num))
    x_gen = np.array([[0.0, 1.0], [1.0, 0.0]])
    z_gen = np.array([[0.0, 1.0], [-1.0, 0.0]])
    f = rho * np.array([np.cos(tau), np.sin(tau)])

    header = ["a", "c", "arg", "modulus", "status"]
    rows = []
    for a in a_vals:
        for c in c_vals:
            kgen = a * x_gen + c * z_gen
            ham = QuadraticHamiltonian(h=k.omega_inv @ kgen, f=f)
            try:
                amp = gqh_overlap_analytic(ham, k)
                rows.append([_fmt(a), _fmt(c), _fmt(np.angle(amp)), _fmt(abs(amp)), "ok"])
            except NumericalDomainError as exc:
                rows.append([_fmt(a), _fmt(c), "nan", "nan", type(exc).__name__])

    if args.format == "json":
        docs = [dict(zip(header, row)) for row in rows]
        _emit_json({"species": species.value, "N": 1, "rho": rho, "tau": tau, "rows": docs},
                   args.out)
    else:
        _emit_csv(header, rows, args.out)
    return 0


def _cmd_fermion(args):
    doc = _load_document(args.input)
    species = _parse_species(doc)
    if species is not Species.FERMION:
        raise InputError("the fermion command expects species 'fermion'")
    n_modes = int(_require(doc, "N"))
    k = standard_kahler(n_modes, Species.FERMION)
    out = {"species": species.value, "N": n_modes}
    refl = reference_reflection(k)
    if "w" in doc:
        refl = normalize_reflection(_parse_vector(doc["w"], k.dim, "w"), k)
    out["w"] = refl.w.tolist()
    mw = mw_reflection(refl, k)
    out["M_w"] = mw.tolist()
    out["M_w_det"] = float(np.linalg.det(mw))
    out["M_w_involution_residual"] = float(np.max(np.abs(mw @ mw - np.eye(k.dim))))
    if "M" in doc:
        m = _parse_matrix(doc["M"], k.dim, "M")
        phase = pin_component_phase(m, refl, k)
        entry = {"det": float(np.linalg.det(m)), "phase": _complex_pair(phase)}
        if n_modes <= 5:
            m_plus = m if np.linalg.det(m) > 0 else mw @ m
            oracle = fermion_vacuum_amplitude(so_generator(m_plus), build_majorana(n_modes))
            entry["oracle_phase"] = _complex_pair(oracle / abs(oracle))
            entry["oracle_agreement"] = abs(phase - oracle / abs(oracle))
        out["pin"] = entry
    if "hamiltonians" in doc:
        entries = []
        for ham in _parse_hamiltonians(doc, k):
            amp = fermion_vacuum_amplitude(ham.h, build_majorana(n_modes))
            m = mat_exp(ham.h)
            c_part, _ = split_cd(m, k)
            det = complex_det(c_part, k.j)
            entries.append(
                {
                    "amplitude": _complex_pair(amp),
                    "squared_identity_residual": abs(amp * amp - det),
                }
            )
        out["amplitudes"] = entries
    _emit_json(out, args.out)
    return 0


_COMMANDS = {
    "compose": _cmd_compose,
    "lift": _cmd_lift,
    "phase": _cmd_phase,
    "verify": _cmd_verify,
    "sweep-time": _cmd_sweep_time,
    "sweep-grid": _cmd_sweep_grid,
    "fermion": _cmd_fermion,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gausslift",
        description="Compose, lift, and verify phase-exact Gaussian unitaries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", help="JSON input document (path or '-' for stdin)")
        p.add_argument("--nmax", help="Fock cutoff(s), comma separated for sweeps")
        p.add_argument("--tol", type=float, default=1e-5, help="verification tolerance")
        p.add_argument("--steps", type=int, default=64, help="initial tracking grid")
        p.add_argument("--seed", type=int, default=0, help="seed recorded for determinism")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--t", type=float, default=1.0, help="evolution time for verify")
        if name == "sweep-grid":
            p.add_argument("--rho", help="displacement magnitude")
            p.add_argument("--tau", help="displacement angle, radians or e.g. '45deg'")
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    is_sweep = args.command.startswith("sweep-")
    if args.format is None:
        args.format = "csv" if is_sweep else "json"
    if args.format == "csv" and not is_sweep:
        return _fail(2, "input", f"{args.command} emits JSON; csv is for sweeps")
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        return _fail(2, "input", str(exc))
    except NumericalDomainError as exc:
        return _fail(3, "numerical-domain", str(exc))
    except GaussLiftError as exc:
        return _fail(3, "numerical-domain", str(exc))


def main_entry():
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
