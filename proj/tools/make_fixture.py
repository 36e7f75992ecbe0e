#!/usr/bin/env python3
"""Generate the synthetic mini corpus used by the tests.

Writes corpus.vert (vertical format with STTS tags and virgules),
clauses.json and referents.tsv. Output depends only on --seed.
"""

import argparse
import json
import random
from pathlib import Path

NOUNS = [
    ("Herr", "Herr"), ("Gott", "Gott"), ("Seele", "Seele"), ("Gnade", "Gnade"),
    ("Sünde", "Sünde"), ("Tod", "Tod"), ("Leben", "Leben"), ("Glaube", "Glaube"),
    ("Hertz", "Herz"), ("Welt", "Welt"), ("Trost", "Trost"), ("Wort", "Wort"),
    ("Himmel", "Himmel"), ("Kirche", "Kirche"), ("Leib", "Leib"), ("Geist", "Geist"),
    ("Freude", "Freude"), ("Creutz", "Kreuz"), ("Christ", "Christ"), ("Frau", "Frau"),
    ("Vatter", "Vater"), ("Kind", "Kind"), ("Hoffnung", "Hoffnung"), ("Ehre", "Ehre"),
]
NAMES = [("Christus", "Christus"), ("Paulus", "Paulus"), ("Israel", "Israel")]
ARTICLES = [("der", "der"), ("die", "die"), ("das", "das"), ("den", "der"),
            ("dem", "der"), ("ein", "ein"), ("eine", "ein")]
RELPRON = [("der", "der"), ("die", "die"), ("welcher", "welcher"), ("welche", "welcher"),
           ("so", "so")]
VERBS_FIN = [("gibt", "geben"), ("liebet", "lieben"), ("tröstet", "trösten"),
             ("erlöset", "erlösen"), ("suchet", "suchen"), ("findet", "finden"),
             ("segnet", "segnen"), ("höret", "hören"), ("preiset", "preisen"),
             ("bewahret", "bewahren"), ("erkennet", "erkennen")]
VERBS_PART = [("gesehen", "sehen"), ("gehöret", "hören"), ("gefunden", "finden"),
              ("erkandt", "erkennen"), ("gelobet", "loben"), ("gesuchet", "suchen")]
ADJ = [("gut", "gut"), ("selig", "selig"), ("heilig", "heilig"), ("groß", "groß"),
       ("fromm", "fromm"), ("ewig", "ewig"), ("arm", "arm"), ("treu", "treu")]
ADV = [("allezeit", "allezeit"), ("gewißlich", "gewisslich"), ("heute", "heute"),
       ("offt", "oft"), ("billich", "billig")]
PRON = [("wir", "wir", "PPER"), ("er", "er", "PPER"), ("sie", "sie", "PPER"),
        ("jhr", "ihr", "PPER")]
AUX = [("haben", "haben"), ("hat", "haben"), ("ist", "sein"), ("wird", "werden")]
CONJ = [("vnd", "und", "KON"), ("aber", "aber", "KON"), ("denn", "denn", "KON")]
PREP = [("in", "in", "APPR"), ("mit", "mit", "APPR"), ("von", "von", "APPR"),
        ("auff", "auf", "APPR")]


class Doc:
    def __init__(self, doc_id):
        self.id = doc_id
        self.sentences = []
        self.words = 0
        self.mentions = []
        self.clauses = []

    def sentence(self):
        self.sentences.append([])

    def add(self, surface, lemma, pos):
        start = self.words
        self.sentences[-1].append((surface, lemma, pos))
        if pos.startswith("$"):
            return None
        self.words += 1
        return start


class Builder:
    def __init__(self, rng):
        self.rng = rng

    def pick(self, items):
        return self.rng.choice(items)

    def noun(self, doc, focus=None):
        """Adds ART NN; records a mention of the noun. Returns its position."""
        art = self.pick(ARTICLES)
        doc.add(art[0], art[1], "ART")
        if focus is not None and self.rng.random() < 0.5:
            surface, lemma = focus
        elif self.rng.random() < 0.12:
            surface, lemma = self.pick(NAMES)
        else:
            surface, lemma = self.pick(NOUNS)
        pos = doc.add(surface, lemma, "NE" if (surface, lemma) in NAMES else "NN")
        doc.mentions.append({
            "start": pos, "end": pos + 1, "ref": lemma,
            "inferable": int(self.rng.random() < 0.2),
            "topic": int(self.rng.random() < 0.25),
        })
        return pos

    def relative_clause(self, doc):
        start = doc.words
        rel = self.pick(RELPRON)
        doc.add(rel[0], rel[1], "PRELS")
        if self.rng.random() < 0.5:
            adv = self.pick(ADV)
            doc.add(adv[0], adv[1], "ADV")
        self.noun(doc)
        verb = self.pick(VERBS_FIN)
        doc.add(verb[0], verb[1], "VVFIN")
        return start, doc.words

    def filler(self, doc, focus):
        p = self.pick(PRON)
        doc.add(p[0], p[1], p[2])
        v = self.pick(VERBS_FIN)
        doc.add(v[0], v[1], "VVFIN")
        self.noun(doc, focus)
        if self.rng.random() < 0.5:
            doc.add("/", "/", "$(")
            c = self.pick(CONJ)
            doc.add(c[0], c[1], c[2])
            pr = self.pick(PREP)
            doc.add(pr[0], pr[1], pr[2])
            self.noun(doc, focus)
            a = self.pick(ADJ)
            doc.add(a[0], a[1], "ADJD")
        doc.add(".", ".", "$.")

    def in_situ(self, doc, focus, cid):
        # ART NN / RC / AUX ADJ .
        m1 = doc.words
        self.noun(doc, focus)
        m1_end = doc.words
        doc.add("/", "/", "$(")
        rc = self.relative_clause(doc)
        doc.add("/", "/", "$(")
        m2 = doc.words
        aux = self.pick(AUX[2:])
        doc.add(aux[0], aux[1], "VAFIN")
        if self.rng.random() < 0.5:
            adv = self.pick(ADV)
            doc.add(adv[0], adv[1], "ADV")
        a = self.pick(ADJ)
        doc.add(a[0], a[1], "ADJD")
        m2_end = doc.words
        doc.add(".", ".", "$.")
        doc.clauses.append({
            "id": cid, "doc": doc.id, "variant": "in_situ",
            "matrix": [[m1, m1_end], [m2, m2_end]], "rc": list(rc),
            "attachment": rc[1] if self.rng.random() < 0.5 else rc[0],
        })

    def extraposed(self, doc, focus, cid):
        # PPER AUX ART NN VVPP / RC .
        m = doc.words
        p = self.pick(PRON)
        doc.add(p[0], p[1], p[2])
        aux = self.pick(AUX[:2])
        doc.add(aux[0], aux[1], "VAFIN")
        head = self.noun(doc, focus)
        part = self.pick(VERBS_PART)
        doc.add(part[0], part[1], "VVPP")
        m_end = doc.words
        doc.add("/", "/", "$(")
        rc = self.relative_clause(doc)
        doc.add(".", ".", "$.")
        doc.clauses.append({
            "id": cid, "doc": doc.id, "variant": "extraposed",
            "matrix": [[m, m_end]], "rc": list(rc), "attachment": head + 1,
        })


def build(seed, docs, sentences):
    rng = random.Random(seed)
    b = Builder(rng)
    out = []
    counter = 0
    for d in range(docs):
        doc = Doc(f"leichpredigt_{d + 1:02d}")
        focus = rng.choice(NOUNS)
        for s in range(sentences):
            if s % 25 == 0:
                focus = rng.choice(NOUNS)
            doc.sentence()
            roll = rng.random()
            if roll < 0.12:
                counter += 1
                b.in_situ(doc, focus, f"c{counter:03d}")
            elif roll < 0.24:
                counter += 1
                b.extraposed(doc, focus, f"c{counter:03d}")
            else:
                b.filler(doc, focus)
        out.append(doc)
    return out


def write(docs, outdir):
    outdir.mkdir(parents=True, exist_ok=True)
    lines = ["# synthetic sermon corpus; generated by tools/make_fixture.py"]
    for doc in docs:
        lines.append(f"# doc: {doc.id}")
        for i, sent in enumerate(doc.sentences):
            if i:
                lines.append("")
            for surface, lemma, pos in sent:
                lines.append(f"{surface}\t{lemma}\t{pos}")
    (outdir / "corpus.vert").write_text("\n".join(lines) + "\n", encoding="utf-8")

    clauses = [c for doc in docs for c in doc.clauses]
    body = ",\n".join(" " + json.dumps(c, ensure_ascii=False) for c in clauses)
    (outdir / "clauses.json").write_text("[\n" + body + "\n]\n", encoding="utf-8")

    rows = ["doc\tstart\tend\treferent_id\tinferable\ttopic"]
    for doc in docs:
        for m in doc.mentions:
            rows.append(f"{doc.id}\t{m['start']}\t{m['end']}\t{m['ref']}\t"
                        f"{m['inferable']}\t{m['topic']}")
    (outdir / "referents.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1672)
    ap.add_argument("--docs", type=int, default=3)
    ap.add_argument("--sentences", type=int, default=140)
    ap.add_argument("--out", type=Path, default=Path("tests/fixtures/mini"))
    args = ap.parse_args()
    docs = build(args.seed, args.docs, args.sentences)
    write(docs, args.out)
    words = sum(d.words for d in docs)
    clauses = sum(len(d.clauses) for d in docs)
    print(f"{len(docs)} documents, {words} words, {clauses} clauses")


if __name__ == "__main__":
    main()
