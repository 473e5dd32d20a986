"""Draw silhouettes of a few family members as SVG files."""

import argparse
from pathlib import Path

from silhlab.experiments import write_atomic
from silhlab.generators import generate, parse_family
from silhlab.geom import AtInfinity
from silhlab.silhouette import emit_svg, extract_silhouette

DEFAULT = ["icosphere:3", "lantern:8,16", "strips:12", "saucer:6,24", "cyl:16,4,caps"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("specs", nargs="*", default=DEFAULT)
    ap.add_argument("--view", default="0.4,0.3,0.87", help="view direction x,y,z")
    ap.add_argument("--outdir", type=Path, default=Path("results/svg"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    vp = AtInfinity([float(c) for c in args.view.split(",")])
    for spec in args.specs:
        mesh, _ = generate(parse_family(spec))
        res = extract_silhouette(mesh, mesh.adjacency, vp)
        path = args.outdir / (spec.replace(":", "_").replace(",", "-") + ".svg")
        write_atomic(path, emit_svg(mesh, mesh.adjacency, res))
        print(f"{spec:<16} {res.size:5d} silhouette edges  length {res.projected_length:.4f}  -> {path}")


if __name__ == "__main__":
    main()
