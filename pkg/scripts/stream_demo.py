"""Show g-nats stage by stage, then the host stream extracted from nats."""

import argparse

from mstt.extraction import extractable_for
from mstt.guarded import g_nats, make_checker, nats, stream_prime
from mstt.syntax import Empty, Nat


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--stages", type=int, default=8)
    ap.add_argument("--take", type=int, default=20)
    args = ap.parse_args()

    chk = make_checker()
    den = chk.infer(g_nats).denotation
    for n in range(args.stages + 1):
        items = [x.n for x in den.at(n, ()).items]
        print(f"stage {n}: {items}")

    ex = extractable_for(chk, stream_prime(Nat))
    stream = ex.extract(chk.infer(nats, Empty("star")).denotation)
    print(f"extracted ({ex.translated_type}): {stream.take(args.take)}")


if __name__ == "__main__":
    main()
