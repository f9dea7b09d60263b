"""Regenerate the BLIF benchmarks bundled under src/bmfx/benchmarks/."""
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "bmfx" / "benchmarks"


def ripple_adder(n):
    a = [f"a{i}" for i in range(n)]
    b = [f"b{i}" for i in range(n)]
    s = [f"s{i}" for i in range(n)]
    lines = [f".model rca{n}", ".inputs " + " ".join(a + b), ".outputs " + " ".join(s + ["cout"])]
    lines += [".names a0 b0 s0", "10 1", "01 1", ".names a0 b0 c1", "11 1"]
    for i in range(1, n):
        cin = f"c{i}"
        cout = "cout" if i == n - 1 else f"c{i + 1}"
        lines += [f".names a{i} b{i} {cin} s{i}", "100 1", "010 1", "001 1", "111 1"]
        lines += [f".names a{i} b{i} {cin} {cout}", "11- 1", "1-1 1", "-11 1"]
    if n == 1:
        lines[-1:] = []
        lines += [".names a0 b0 cout", "11 1"]
    lines.append(".end")
    return "\n".join(lines) + "\n"


def mul2():
    return "\n".join([
        ".model mul2",
        ".inputs a0 a1 b0 b1",
        ".outputs p0 p1 p2 p3",
        ".names a0 b0 p0", "11 1",
        ".names a1 b0 t10", "11 1",
        ".names a0 b1 t01", "11 1",
        ".names a1 b1 t11", "11 1",
        ".names t10 t01 p1", "10 1", "01 1",
        ".names t10 t01 k1", "11 1",
        ".names t11 k1 p2", "10 1", "01 1",
        ".names t11 k1 p3", "11 1",
        ".end",
    ]) + "\n"


def mux_tree(levels):
    n = 1 << levels
    d = [f"d{i}" for i in range(n)]
    s = [f"s{i}" for i in range(levels)]
    lines = [f".model mux{n}", ".inputs " + " ".join(d + s), ".outputs y"]
    cur = d
    for lvl in range(levels):
        nxt = []
        for j in range(0, len(cur), 2):
            out = "y" if len(cur) == 2 else f"m{lvl}_{j // 2}"
            lines += [f".names {cur[j]} {cur[j + 1]} s{lvl} {out}", "1-0 1", "-11 1"]
            nxt.append(out)
        cur = nxt
    lines.append(".end")
    return "\n".join(lines) + "\n"


def parity_tree(n):
    x = [f"x{i}" for i in range(n)]
    lines = [f".model parity{n}", ".inputs " + " ".join(x), ".outputs p"]
    cur, k = x, 0
    while len(cur) > 1:
        nxt = []
        for j in range(0, len(cur) - 1, 2):
            out = "p" if len(cur) == 2 else f"t{k}"
            k += 1
            lines += [f".names {cur[j]} {cur[j + 1]} {out}", "10 1", "01 1"]
            nxt.append(out)
        if len(cur) % 2:
            nxt.append(cur[-1])
        cur = nxt
    lines.append(".end")
    return "\n".join(lines) + "\n"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    files = {f"rca{n}.blif": ripple_adder(n) for n in (4, 8, 16, 32)}
    files["mul2.blif"] = mul2()
    files["mux16.blif"] = mux_tree(4)
    files["parity24.blif"] = parity_tree(24)
    for name, text in files.items():
        (OUT / name).write_text(text)
        print("wrote", OUT / name)


if __name__ == "__main__":
    main()
