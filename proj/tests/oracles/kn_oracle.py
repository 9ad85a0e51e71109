#!/usr/bin/env python3
"""Exact-arithmetic interpolated modified Kneser-Ney trigram probabilities.

Independent of the C++ code; used to freeze the constants in kn_lm_test.cc.
Usage: kn_oracle.py  (prints the frozen values)
"""
from collections import Counter, defaultdict
from fractions import Fraction as F

BOS, EOS, UNK = "<s>", "</s>", "<unk>"


def train(corpus, min_count=2):
    wc = Counter(w for s in corpus for w in s)
    keep = {w for w, c in wc.items() if c >= min_count}
    vocab = [EOS, UNK] + sorted(keep)
    tri = Counter()
    for s in corpus:
        toks = [BOS, BOS] + [w if w in keep else UNK for w in s] + [EOS]
        for i in range(2, len(toks)):
            tri[tuple(toks[i - 2:i + 1])] += 1
    bi = Counter()
    for (u, v, w) in tri:
        bi[(v, w)] += 1
    uni = Counter()
    for (v, w) in bi:
        uni[w] += 1

    def discounts(counts):
        n = [sum(1 for c in counts if c == k) for k in (1, 2, 3, 4)]
        if 0 in n[:3]:
            return [F(3, 4)] * 3
        y = F(n[0], n[0] + 2 * n[1])
        d = [1 - 2 * y * n[1] / n[0], 2 - 3 * y * n[2] / n[1],
             3 - 4 * y * n[3] / n[2]]
        if any(not (0 <= d[k] <= k + 1) for k in range(3)):
            return [F(3, 4)] * 3
        return d

    D3 = discounts(tri.values())
    D2 = discounts(bi.values())
    D1 = discounts(uni.values())

    def disc(D, c):
        return 0 if c == 0 else D[min(c, 3) - 1]

    def level(D, table, ctx, w, lower):
        row = {k[-1]: c for k, c in table.items() if k[:-1] == ctx}
        if not row:
            return lower
        total = sum(row.values())
        g = sum(disc(D, c) for c in row.values()) / F(total)
        c = row.get(w, 0)
        return max(c - disc(D, c), 0) / F(total) + g * lower

    def p1(w):
        total = sum(uni.values())
        g = sum(disc(D1, c) for c in uni.values()) / F(total)
        c = uni.get(w, 0)
        return max(c - disc(D1, c), 0) / F(total) + g / len(vocab)

    def p2(w, v):
        return level(D2, bi, (v,), w, p1(w))

    def p3(w, u, v):
        return level(D3, tri, (u, v), w, p2(w, v))

    def known(x):
        return x if x in keep or x in (BOS, EOS) else UNK

    def q1(w):
        return p1(known(w))

    def q2(w, v):
        return p2(known(w), known(v))

    def q3(w, u, v):
        return p3(known(w), known(u), known(v))

    return vocab, q1, q2, q3, (D1, D2, D3)


def main():
    _, p1, p2, _, _ = train([["a", "b", "a", "b"]])
    print("abab P1(b) =", p1("b"), float(p1("b")))
    print("abab P(b|a) =", p2("b", "a"), float(p2("b", "a")))
    corpus = [s.split() for s in [
        "the cat sat on the mat", "the dog sat on the log",
        "a cat saw the dog", "the cat sat", "a dog sat on a mat",
        "the mat was on the log", "a cat and a dog", "on the mat the cat sat",
        "the dog saw a cat on the log"]]
    vocab, p1, p2, p3, ds = train(corpus)
    print("discounts", [[str(x) for x in d] for d in ds])
    for w, u, v in [("sat", "the", "cat"), ("mat", "on", "the"),
                    ("dog", "<s>", "a"), ("</s>", "cat", "sat"),
                    ("log", "was", "on"), ("<unk>", "a", "cat")]:
        p = p3(w, u, v)
        print(f"P({w}|{u},{v}) = {p} = {float(p)!r}")


if __name__ == "__main__":
    main()
