"""Command-line drivers.

Every subcommand writes CSV/JSON files whose first lines are ``#`` comments
with the configuration hash, ``gamma``, ``T``, ``jmax`` and ``rmax``, runs the
invariant checks of its module and exits with

* 0 when every check passes,
* 1 on the first failing invariant (named on stderr),
* 2 on a configuration error,
* 3 when a resolution guard refuses the grid.
"""

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from .cutoffs import ScaleSector, SliceConfig
from .propagator import ResolutionError, config_hash

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOLUTION = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


class InvariantFailure(AssertionError):
    pass


def _pow2(n):
    return isinstance(n, int) and n > 0 and not n & (n - 1)


@dataclass
class RunConfig:
    """Run parameters; ``grids`` maps names to power-of-two sizes."""

    gamma: float = 14.0
    temperature: float = 0.01
    lam: float = 0.01
    gevrey_index: float = 2.0
    grids: dict = field(default_factory=dict)
    seed: int = 0
    out: str = "out"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        try:
            self.gamma, self.temperature = float(self.gamma), float(self.temperature)
            self.lam, self.gevrey_index = float(self.lam), float(self.gevrey_index)
            self.seed = int(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad numeric field: {exc}") from exc
        if not self.gamma >= 4:
            raise ConfigError("gamma must be at least 4")
        if not self.temperature > 0:
            raise ConfigError("temperature must be positive")
        if not self.gevrey_index > 1:
            raise ConfigError("Gevrey index must exceed 1")
        for k, v in self.grids.items():
            if not _pow2(v):
                raise ConfigError(f"grid size {k}={v} is not a power of two")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    @property
    def slice_config(self):
        return SliceConfig(gamma=self.gamma, T=self.temperature, order=self.gevrey_index)

    def grid(self, name, default):
        return int(self.grids.get(name, default))

    def opt(self, name, default):
        return self.options.get(name, default)

    def as_dict(self):
        d = asdict(self)
        d.pop("out")
        return d

    @property
    def hash(self):
        return config_hash(self.as_dict())

    def header(self, extra=()):
        cfg = self.slice_config
        return [f"config_hash={self.hash}", f"gamma={self.gamma!r}", f"T={self.temperature!r}",
                f"jmax={cfg.jmax}", f"rmax={cfg.rmax}"] + list(extra)

    @classmethod
    def load(cls, path=None, **overrides):
        data = {}
        if path:
            try:
                with open(path) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        known = set(cls.__dataclass_fields__)
        extra = {k: v for k, v in data.items() if k not in known}
        data = {k: v for k, v in data.items() if k in known}
        data.setdefault("options", {}).update(extra)
        data.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _path(cfg, name):
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return int(x)
    return x


def _write_rows(path, header, columns, rows):
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        wr = csv.writer(fh)
        wr.writerow(columns)
        for row in rows:
            wr.writerow([_cell(x) for x in row])


def _write_json(path, header, obj):
    with open(path, "w") as fh:
        json.dump({"header": header, "data": obj}, fh, indent=1, sort_keys=True, default=float)


def _require(ok, name):
    if not ok:
        raise InvariantFailure(name)


# ----------------------------------------------------------------------------
# subcommands

def cmd_fermi_surface(cfg, args):
    from .lattice import FERMI_POINTS, band_energy, curve_geometry, fermi_surface_lines, pm_coords, trace_level_set
    mu = float(cfg.opt("mu", 1.0))
    if mu < 0:
        raise ConfigError("mu must be non-negative")
    res = cfg.grid("rays", 64)
    rows = []
    if mu == 1.0:
        t = np.linspace(0, 1, res)
        for idx, line in enumerate(fermi_surface_lines(mu)):
            k1, k2 = line.sample(t)
            e = band_energy(k1, k2, mu)
            rows += [(idx, line.family, a, b, c) for a, b, c in zip(k1, k2, e)]
    else:
        for idx, c in enumerate(FERMI_POINTS):
            for p in trace_level_set(mu, 0.0, res, center=c):
                rows.append((idx, "level", p.k1, p.k2, band_energy(p.k1, p.k2, mu)))
    rows = [(c, f, k1, k2, *pm_coords(k1, k2), e) for c, f, k1, k2, e in rows]
    _write_rows(_path(cfg, "fermi_surface.csv"), cfg.header([f"mu={mu!r}"]),
                ["curve", "family", "k1", "k2", "kplus", "kminus", "e"], rows)
    _require(rows and max(abs(r[6]) for r in rows) < 1e-10, "fermi-surface: |e| < 1e-10 on samples")
    geo = []
    if mu == 1.0:
        for h in (3, 4, 5):
            for k1 in (0.01, 0.05, 0.1):
                g = curve_geometry(k1, h, cfg.gamma)
                geo.append((h, k1, g.R, g.w, g.l))
        _write_rows(_path(cfg, "curve_geometry.csv"), cfg.header(), ["h", "k1", "R", "w", "l"], geo)
    return {"points": len(rows), "curves": len({r[0] for r in rows})}


def cmd_propagator(cfg, args):
    from .propagator import SectorMesh, norm_report, write_norm_csv
    j = int(cfg.opt("j", 4))
    sec = tuple(cfg.opt("sector", (j, (j + 1) // 2, (j + 1) // 2)))
    sector = ScaleSector(*sec).check()
    sc = SliceConfig(gamma=cfg.gamma, T=cfg.temperature, order=cfg.gevrey_index)
    rep = norm_report(sector, SectorMesh(N=cfg.grid("mesh", 1024)), sc)
    write_norm_csv([rep], _path(cfg, "propagator_norms.csv"), cfg.header())
    g = cfg.gamma
    _require(0.3 <= rep.sup_norm / g ** rep.j <= 30, "propagator: sup norm / gamma^j in [0.3, 30]")
    _require(0.1 <= rep.l1_norm / g ** rep.j <= 100, "propagator: L1 norm / gamma^j in [0.1, 100]")
    _require(rep.decay_c > 0.05, "propagator: decay rate c > 0.05")
    _require(0.35 <= rep.alpha_fit <= 0.65, "propagator: alpha in [0.35, 0.65]")
    return asdict(rep)


def cmd_tadpole(cfg, args):
    from .perturbation import tadpole_config, tadpole_curvature, tadpole_scan, tadpole_table_csv, counterterm_flow
    js = [int(x) for x in cfg.opt("j", list(range(5, 11)))]
    tc = tadpole_config(cfg.gamma)
    res = tadpole_scan(cfg.lam, js, tc)
    tadpole_table_csv(res, _path(cfg, "tadpole.csv"), cfg.header([f"lambda={cfg.lam!r}", "T_slices=continuum"]))
    ratio = res.ratio_to_claim()
    curv = [tadpole_curvature(j, cfg.lam, tc) for j in js]
    cr = [b / a for a, b in zip(curv, curv[1:])]
    flow = counterterm_flow(cfg.lam, cfg.slice_config)
    _write_rows(_path(cfg, "counterterm_flow.csv"), cfg.header([f"lambda={cfg.lam!r}"]),
                ["r", "delta_mu", "partial_sum"],
                [(r, float(a), float(b)) for r, (a, b) in enumerate(zip(flow.delta_mu, flow.partial))])
    _require(ratio.max() / ratio.min() <= 10, "tadpole: two-sided window max/min <= 10")
    _require(all(cfg.gamma / 2 <= x <= 2 * cfg.gamma for x in cr), "tadpole: curvature ratio in [gamma/2, 2 gamma]")
    _require(flow.telescoping_error() <= 1e-12 and flow.endpoint == 0.0, "flow: telescoping and BPHZ endpoint")
    return {"ratio_min": float(ratio.min()), "ratio_max": float(ratio.max()), "curvature_ratios": cr, "K": flow.K}


def cmd_selfenergy(cfg, args):
    from .perturbation import sunshine_self_energy_scan
    rs = [int(x) for x in cfg.opt("r", [2, 3, 4])]
    scan = sunshine_self_energy_scan(cfg.lam, rs, cfg.slice_config, L=cfg.grid("L", 512),
                                     kmax=float(cfg.opt("kmax", 1.5)))
    g = cfg.gamma
    rows = []
    prev = None
    for r, s, a, b in zip(scan.r, scan.sigma, scan.d1, scan.d2):
        q = None if prev is None else abs(b) / prev
        ok = "" if q is None else ("pass" if g / 4 <= q <= 4 * g else "fail")
        rows.append((int(r), abs(s), abs(a), abs(b), "" if q is None else q, ok))
        prev = abs(b)
    _write_rows(_path(cfg, "selfenergy.csv"), cfg.header([f"lambda={cfg.lam!r}", f"L={scan.L}", "probe=(piT,1,0)"]),
                ["r", "sigma_value", "d1", "d2", "ratio_to_prev", "check"], rows)
    _require(all(r[5] != "fail" for r in rows), "selfenergy: second-difference ratio in [gamma/4, 4 gamma]")
    return {"d2_ratios": [float(x) for x in scan.ratios()]}


def cmd_bkar_check(cfg, args):
    from . import forests as F
    n = int(cfg.opt("n", 4))
    rng = np.random.default_rng(cfg.seed)
    errs = []
    for _ in range(int(cfg.opt("polynomials", 5))):
        f = F.random_polynomial(len(F.pairs(n)), 4, rng)
        rhs, lhs = F.bkar_evaluate(f, n)
        errs.append(abs(rhs - lhs))
    mins = []
    forests = F.enumerate_forests(n)
    for _ in range(int(cfg.opt("draws", 100))):
        fo = forests[int(rng.integers(len(forests)))]
        X = F.weakening_matrix(fo, rng.uniform(size=len(fo.edges)))
        mins.append(float(np.linalg.eigvalsh(X).min()))
    trees = [F.random_gn_tree(int(rng.integers(2, 6)), int(rng.integers(2, 7)), rng) for _ in range(50)]
    gn_ok = all(a == b and c == d for a, b, c, d in map(F.power_counting_identity_check, trees))
    _write_json(_path(cfg, f"forests_n{n}.json"), cfg.header(), [{"n": f.n, "edges": [list(e) for e in f.edges]} for f in forests])
    _write_json(_path(cfg, "gn_trees.json"), cfg.header(), [t.to_dict() for t in trees[:10]])
    _write_json(_path(cfg, "arch_systems_p4.json"), cfg.header(), [a.to_dict() for a in F.enumerate_arch_systems(4)])
    _write_json(_path(cfg, "bkar_check.json"), cfg.header([f"n={n}"]),
                {"max_error": max(errs), "min_eigenvalue": min(mins), "gn_identities": gn_ok})
    _require(max(errs) <= 1e-10, "bkar: forest formula equals f(1)")
    _require(min(mins) >= -1e-10, "bkar: weakening matrix positive semidefinite")
    _require(gn_ok, "gn: power-counting identities")
    return {"max_error": max(errs), "min_eigenvalue": min(mins)}


def cmd_sector_count(cfg, args):
    from .sectors import sector_scan, write_scan_csv
    rs = [int(x) for x in cfg.opt("r", [10, 20, 40])]
    kind = cfg.opt("kind", "bare")
    n = int(cfg.opt("n", 3))
    rows = sector_scan(kind, n, rs, cfg.gamma)
    write_scan_csv(rows, _path(cfg, f"sector_count_{kind}.csv"), cfg.header([f"kind={kind}", f"n={n}"]))
    norm = [r.normalised for r in rows]
    if kind != "bare-off":
        _require(max(norm) / min(norm) <= 4, f"sector-count: {kind} sum / claimed growth max/min <= 4")
    return {"normalised": norm}


COMMANDS = {
    "fermi-surface": cmd_fermi_surface,
    "propagator": cmd_propagator,
    "tadpole": cmd_tadpole,
    "selfenergy": cmd_selfenergy,
    "bkar-check": cmd_bkar_check,
    "sector-count": cmd_sector_count,
}


SUBCOMMAND_FLAGS = ("mu", "j", "r", "n", "kind")


def build_parser():
    p = argparse.ArgumentParser(prog="honeyrg", description="Multiscale analysis drivers for the honeycomb model.")
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--gamma", type=float)
    p.add_argument("--temperature", "-T", type=float)
    p.add_argument("--lam", "--lambda", type=float, dest="lam")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        if name == "fermi-surface":
            s.add_argument("--mu", type=float)
        if name in ("propagator",):
            s.add_argument("--j", type=int)
        if name == "tadpole":
            s.add_argument("--j", type=int, nargs="+")
        if name in ("selfenergy", "sector-count"):
            s.add_argument("--r", type=int, nargs="+")
        if name in ("bkar-check", "sector-count"):
            s.add_argument("--n", type=int)
        if name == "sector-count":
            s.add_argument("--kind", choices=["bare", "bare-off", "biped", "quadruped"])
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config, gamma=args.gamma, temperature=args.temperature, lam=args.lam,
                             seed=args.seed, out=args.out)
        # subcommand flags are part of the configuration (and its hash)
        for name in SUBCOMMAND_FLAGS:
            if getattr(args, name, None) is not None:
                cfg.options[name] = getattr(args, name)
        summary = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResolutionError as exc:
        print(f"resolution guard: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except InvariantFailure as exc:
        print(f"invariant failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"I/O error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_FAIL
    print(json.dumps({"command": args.command, "config_hash": cfg.hash, **summary}, default=float, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
