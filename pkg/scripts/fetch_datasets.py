#!/usr/bin/env python3
"""Download and convert the public benchmark hypergraphs.

Licenses and hosting vary by dataset, so nothing is bundled with the
package; this script documents the sources and converts everything into
the canonical layout the experiments expect:

    data/<name>.txt           one hyperedge per line, space-separated ids
    data/<name>-labels.txt    "node_id label" per line (labeled sets only)

Sources
-------
* Simplicial/tag/contact/email collections (email-Enron, email-Eu, DAWN,
  NDC-classes, congress-bills, contact-high-school,
  contact-primary-school, tags-ask-ubuntu, tags-math-sx):
  https://www.cs.cornell.edu/~arb/data/  (triple-file layout:
  <name>-nverts.txt, <name>-simplices.txt, <name>-times.txt)
* Labeled school/committee hypergraphs (High-school, Primary-school,
  Senate-committees, House-committees):
  https://github.com/PhilChodrow/HypergraphModularity (data/<name>/
  hyperedges-<name>.txt + node-labels-<name>.txt)
* Cora and Citeseer keyword hypergraphs: the LINQS releases
  https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz and citeseer.tgz;
  every keyword becomes a hyperedge joining the papers that carry it
  (hyperedges of fewer than two papers are dropped), and the class column
  provides community labels.
* Metabolic models (iAF1260b, iAF987, iCN900): http://bigg.ucsd.edu/models
  (JSON; each reaction's metabolite set becomes one hyperedge).

Run `python scripts/fetch_datasets.py --dest data` on a machine with
network access; already-present files are kept.
"""

import argparse
import io
import json
import tarfile
import urllib.request
from pathlib import Path

BENSON_BASE = "https://www.cs.cornell.edu/~arb/data"
BENSON_SETS = [
    "email-Enron",
    "email-Eu",
    "DAWN",
    "NDC-classes",
    "congress-bills",
    "contact-high-school",
    "contact-primary-school",
    "tags-ask-ubuntu",
    "tags-math-sx",
]
CHODROW_BASE = (
    "https://raw.githubusercontent.com/PhilChodrow/HypergraphModularity/master/data"
)
CHODROW_SETS = {
    # canonical name -> repository directory name
    "High-school": "contact-high-school-classes",
    "Primary-school": "contact-primary-school-classes",
    "Senate-committees": "senate-committees",
    "House-committees": "house-committees",
}
LINQS = {
    "Cora": "https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz",
    "Citeseer": "https://linqs-data.soe.ucsc.edu/public/lbc/citeseer.tgz",
}
BIGG = {
    "iAF1260b": "http://bigg.ucsd.edu/static/models/iAF1260b.json",
    "iAF987": "http://bigg.ucsd.edu/static/models/iAF987.json",
    "iCN900": "http://bigg.ucsd.edu/static/models/iCN900.json",
}


def fetch(url: str) -> bytes:
    print(f"  GET {url}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read()


def write_canonical(dest: Path, name: str, hyperedges) -> None:
    path = dest / f"{name}.txt"
    with open(path, "w", encoding="utf-8") as fh:
        for edge in hyperedges:
            fh.write(" ".join(str(v) for v in edge) + "\n")
    print(f"  wrote {path} ({len(hyperedges)} hyperedges)")


def convert_triple(nverts_text: str, simplices_text: str):
    sizes = [int(tok) for tok in nverts_text.split()]
    flat = simplices_text.split()
    out, pos = [], 0
    for size in sizes:
        edge = flat[pos : pos + size]
        pos += size
        if len(set(edge)) >= 2:
            out.append(sorted(set(edge), key=edge.index))
    return out


def fetch_benson(dest: Path, name: str) -> None:
    if (dest / f"{name}.txt").exists():
        print(f"  {name}.txt already present")
        return
    blob = fetch(f"{BENSON_BASE}/{name}/{name}.tar.gz")
    archive = tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz")

    def read_member(suffix: str) -> str:
        for member in archive.getmembers():
            if member.name.endswith(suffix):
                return archive.extractfile(member).read().decode()
        raise FileNotFoundError(f"{suffix} not in archive for {name}")

    edges = convert_triple(
        read_member(f"{name}-nverts.txt"), read_member(f"{name}-simplices.txt")
    )
    write_canonical(dest, name, edges)


def fetch_chodrow(dest: Path, name: str, repo_dir: str) -> None:
    if (dest / f"{name}.txt").exists():
        print(f"  {name}.txt already present")
        return
    edges_text = fetch(f"{CHODROW_BASE}/{repo_dir}/hyperedges-{repo_dir}.txt").decode()
    labels_text = fetch(f"{CHODROW_BASE}/{repo_dir}/node-labels-{repo_dir}.txt").decode()
    edges = []
    for line in edges_text.splitlines():
        members = [tok for tok in line.replace(",", " ").split() if tok]
        if len(set(members)) >= 2:
            edges.append(sorted(set(members), key=members.index))
    write_canonical(dest, name, edges)
    with open(dest / f"{name}-labels.txt", "w", encoding="utf-8") as fh:
        for node, label in enumerate(labels_text.split(), start=1):
            fh.write(f"{node} {label}\n")
    print(f"  wrote {dest / f'{name}-labels.txt'}")


def convert_linqs_content(content_text: str):
    """LINQS .content: "<id> <binary word flags...> <class>" per line."""
    hyperedges: dict[int, list[str]] = {}
    labels: dict[str, str] = {}
    for line in content_text.splitlines():
        parts = line.split()
        if len(parts) < 3:
            continue
        paper, flags, cls = parts[0], parts[1:-1], parts[-1]
        labels[paper] = cls
        for j, flag in enumerate(flags):
            if flag != "0":
                hyperedges.setdefault(j, []).append(paper)
    edges = [papers for papers in hyperedges.values() if len(papers) >= 2]
    return edges, labels


def fetch_linqs(dest: Path, name: str, url: str) -> None:
    if (dest / f"{name}.txt").exists():
        print(f"  {name}.txt already present")
        return
    blob = fetch(url)
    archive = tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz")
    content = None
    for member in archive.getmembers():
        if member.name.endswith(".content"):
            content = archive.extractfile(member).read().decode()
    if content is None:
        raise FileNotFoundError(f"no .content member in {url}")
    edges, labels = convert_linqs_content(content)
    write_canonical(dest, name, edges)
    # keep only papers that survived the order>=2 filter
    present = {p for edge in edges for p in edge}
    with open(dest / f"{name}-labels.txt", "w", encoding="utf-8") as fh:
        for paper, cls in labels.items():
            if paper in present:
                fh.write(f"{paper} {cls}\n")
    print(f"  wrote {dest / f'{name}-labels.txt'}")


def fetch_bigg(dest: Path, name: str, url: str) -> None:
    if (dest / f"{name}.txt").exists():
        print(f"  {name}.txt already present")
        return
    model = json.loads(fetch(url).decode())
    edges = []
    for reaction in model.get("reactions", []):
        metabolites = list(reaction.get("metabolites", {}))
        if len(set(metabolites)) >= 2:
            edges.append(metabolites)
    write_canonical(dest, name, edges)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default="data")
    parser.add_argument("--only", default=None, help="comma list of dataset names")
    args = parser.parse_args()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    wanted = set(args.only.split(",")) if args.only else None

    def want(name):
        return wanted is None or name in wanted

    failures = []
    for name in BENSON_SETS:
        if want(name):
            print(name)
            try:
                fetch_benson(dest, name)
            except Exception as exc:
                failures.append((name, exc))
                print(f"  FAILED: {exc}")
    for name, repo_dir in CHODROW_SETS.items():
        if want(name):
            print(name)
            try:
                fetch_chodrow(dest, name, repo_dir)
            except Exception as exc:
                failures.append((name, exc))
                print(f"  FAILED: {exc}")
    for name, url in LINQS.items():
        if want(name):
            print(name)
            try:
                fetch_linqs(dest, name, url)
            except Exception as exc:
                failures.append((name, exc))
                print(f"  FAILED: {exc}")
    for name, url in BIGG.items():
        if want(name):
            print(name)
            try:
                fetch_bigg(dest, name, url)
            except Exception as exc:
                failures.append((name, exc))
                print(f"  FAILED: {exc}")
    if failures:
        print(f"\n{len(failures)} dataset(s) failed; see the module docstring "
              "for manual download locations.")
    else:
        print("\nall requested datasets ready; cross-check counts with "
              "`hypermine convert` statistics.")


if __name__ == "__main__":
    main()
