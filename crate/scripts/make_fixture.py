#!/usr/bin/env python3
"""Generate the synthetic fixture corpora used by the test suites.

Molecules are assembled from ring and substituent templates so that every
string is valid by construction. The output is deterministic for a given seed.

    python3 scripts/make_fixture.py crates/core/tests/data
"""
import random
import sys
from pathlib import Path

# Ring templates. "{r}" / "{q}" are ring-closure digits, "{s}" marks a position
# that may carry a substituent branch. The first atom is the attachment atom
# when the ring is used as a substituent.
RINGS = [
    "c{r}{s}c{s}c{s}c{s}c{s}c{r}",             # benzene
    "c{r}{s}c{s}c{s}c{s}c{s}c{r}",             # benzene (weighted)
    "c{r}{s}c{s}c{s}nc{s}c{r}",                # pyridine
    "c{r}{s}c{s}ncnc{r}",                      # pyrimidine
    "c{r}{s}c{s}c{s}c{s}o{r}",                # furan
    "c{r}{s}c{s}c{s}c{s}s{r}",                # thiophene
    "c{r}{s}c{s}c{s}c{s}[nH]{r}",             # pyrrole
    "c{r}{s}nc{s}c{s}s{r}",                    # thiazole
    "c{r}{s}nc{s}c{s}o{r}",                    # oxazole
    "c{r}{s}c{s}c{s}c{q}c{s}c{s}c{s}c{s}c{q}c{r}",  # naphthalene
    "c{r}{s}c{s}c{s}c{q}[nH]c{s}c{s}c{q}c{r}",      # indole
    "c{r}{s}c{s}c{s}c{q}nc{s}c{s}c{s}c{q}c{r}",     # quinoline
    "c{r}{s}c{s}c{s}c{q}[nH]cnc{q}c{r}",            # benzimidazole
    "c{r}{s}c{s}c{s}c{q}oc{s}c{s}c{q}c{r}",         # benzofuran
    "C{r}{s}C{s}C{s}C{s}C{s}C{r}",             # cyclohexane
    "C{r}{s}C{s}C{s}C{s}C{r}",                 # cyclopentane
    "C{r}{s}C{s}C{r}",                         # cyclopropane
    "C{r}{s}C{s}CN{s}C{s}C{r}",                # piperidine
    "C{r}{s}C{s}N{s}C{s}C{s}N{r}{s}",          # piperazine
    "C{r}{s}COC{s}CN{r}{s}",                   # morpholine
    "C{r}{s}C{s}CC{s}O{r}",                    # tetrahydrofuran
]

SUBSTITUENTS = [
    "C", "C", "C", "CC", "O", "OC", "N", "F", "F", "Cl", "Br", "I",
    "C(=O)O", "C(=O)N", "C(=O)OC", "C#N", "C(F)(F)F", "S(=O)(=O)C",
    "N(C)C", "C=O", "CO", "CCN", "OCC", "C(C)C", "NC(=O)C", "S(=O)(=O)N",
    "[N+](=O)[O-]", "CC(=O)O", "OC(F)(F)F", "SC", "C=C", "C#C",
]

LINKERS = ["", "", "C", "CC", "O", "N", "C(=O)N", "NC(=O)", "S(=O)(=O)", "OC", "CO", "C=C"]

PREFIXES = ["C", "CC", "O", "OC", "N", "F", "Cl", "Br", "CC(=O)N", "CO", "CC(C)", "NC"]

EXTENDABLE_CHAINS = ["CCO", "CCCC", "CC(C)C", "CCN", "CC(=O)O", "NCCO", "CC(N)C(=O)O", "CCS", "COCCO"]

CHAINS = [
    "CCO", "CCCC", "CC(C)C", "CCN", "CC(=O)O", "CCOC(=O)C", "CC(C)CC(=O)O",
    "NCCO", "CCCCCCO", "CC(N)C(=O)O", "OCC(O)CO", "CN(C)C=O", "CCS", "C=CC=O",
    "CC#N", "CCCl", "FC(F)Cl", "CC(=O)NC", "COCCOC", "CCC(=O)CC",
]


class Builder:
    def __init__(self, rng):
        self.rng = rng
        self.next_digit = 1

    def digit(self):
        d = self.next_digit
        self.next_digit += 1
        return str(d) if d < 10 else "%{:02d}".format(d)

    def substituent(self, depth):
        rng = self.rng
        if depth < 2 and rng.random() < 0.22 and self.next_digit < 8:
            return rng.choice(LINKERS) + self.ring(depth + 1, as_substituent=True)
        return rng.choice(SUBSTITUENTS)

    def ring(self, depth, as_substituent=False):
        rng = self.rng
        template = rng.choice(RINGS)
        r = self.digit()
        q = self.digit() if "{q}" in template else ""
        slots = template.count("{s}")
        budget = rng.choice([0, 1, 1, 2, 2, 3]) if depth == 0 else rng.choice([0, 0, 1])
        chosen = set(rng.sample(range(slots), min(budget, slots)))
        if as_substituent:
            chosen.discard(0)
        parts = template.split("{s}")
        out = []
        for i, part in enumerate(parts):
            out.append(part.replace("{r}", r).replace("{q}", q))
            if i < slots and i in chosen:
                out.append("(" + self.substituent(depth) + ")")
        return "".join(out)

    def molecule(self):
        rng = self.rng
        if rng.random() < 0.12:
            if rng.random() < 0.5:
                return rng.choice(EXTENDABLE_CHAINS) + rng.choice(LINKERS) + self.ring(1, as_substituent=True)
            return rng.choice(CHAINS)
        if rng.random() < 0.35:
            return rng.choice(PREFIXES) + self.ring(0, as_substituent=True)
        return self.ring(0)


def main():
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    rng = random.Random(20221017)
    seen = set()
    mols = []
    while len(mols) < 2000:
        smi = Builder(rng).molecule()
        if smi in seen:
            continue
        seen.add(smi)
        mols.append(smi)
    header = "# synthetic fixture corpus generated by scripts/make_fixture.py\n"
    with open(out_dir / "fixture_1k.smi", "w") as f:
        f.write(header)
        for i, smi in enumerate(mols[:1000]):
            f.write("{}\tmol{:04d}\n".format(smi, i))
    with open(out_dir / "fixture_2k.smi", "w") as f:
        f.write(header)
        for i, smi in enumerate(mols):
            f.write("{}\tmol{:04d}\n".format(smi, i))


if __name__ == "__main__":
    main()
