#!/usr/bin/env python3
"""Convert TCF (TEI-derived WebLicht format, as offered by the DTA) to the
vertical corpus format read by uidkit.

Each input file becomes one document whose id is the file stem. Tokens come
from the text corpus layer; lemmas and POS tags are attached by token id and
sentence boundaries are taken from the sentences layer. Tokens without a
lemma fall back to their surface form.

    tcf2vert.py book1.tcf.xml book2.tcf.xml > sermons.vert
"""

import argparse
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

TC = "{http://www.dspin.de/data/textcorpus}"


def convert(path, doc_id=None):
    root = ET.parse(path).getroot()
    corpus = root.find(f".//{TC}TextCorpus")
    if corpus is None:
        raise ValueError(f"{path}: no TextCorpus element")

    tokens = {}
    order = []
    for t in corpus.iterfind(f"{TC}tokens/{TC}token"):
        tokens[t.get("ID")] = (t.text or "").strip()
        order.append(t.get("ID"))
    lemmas = {}
    for lem in corpus.iterfind(f"{TC}lemmas/{TC}lemma"):
        for tid in (lem.get("tokenIDs") or "").split():
            lemmas[tid] = (lem.text or "").strip()
    tags = {}
    for tag in corpus.iterfind(f"{TC}POStags/{TC}tag"):
        for tid in (tag.get("tokenIDs") or "").split():
            tags[tid] = (tag.text or "").strip()

    sentences = [s.get("tokenIDs", "").split()
                 for s in corpus.iterfind(f"{TC}sentences/{TC}sentence")]
    if not sentences:
        sentences = [order]

    lines = [f"# doc: {doc_id or Path(path).name.split('.')[0]}"]
    for i, sent in enumerate(sentences):
        if i:
            lines.append("")
        for tid in sent:
            surface = tokens.get(tid, "")
            if not surface or "\t" in surface:
                continue
            row = [surface, lemmas.get(tid) or surface]
            if tid in tags:
                row.append(tags[tid])
            lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("files", nargs="+", type=Path)
    ap.add_argument("-o", "--output", type=Path)
    args = ap.parse_args()
    text = "".join(convert(f) for f in args.files)
    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
