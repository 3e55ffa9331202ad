import numpy as np
import pytest

from bmst_ht.cli import bits_to_hex, hex_to_bits, main, parse_sweep


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def body(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


@pytest.mark.parametrize("k, poly", [(2, "1 + XY^4 + XY^8 + X^2Y^4"), (1, "1 + XY^8")])
def test_iowef(capsys, k, poly):
    code, out = run(capsys, "iowef", "--n", "8", "--k", str(k))
    assert code == 0
    lines = body(out.out)
    assert lines[0] == poly
    assert out.out.startswith("# tool: bmst-ht")


def test_iowef_n2(capsys):
    _, out = run(capsys, "iowef", "--n", "2", "--k", "1")
    assert body(out.out) == ["1 + XY^2", "0 0 1", "1 2 1"]


def test_iowef_guard_exit_code(capsys):
    code, out = run(capsys, "iowef", "--n", "32", "--k", "30")
    assert code == 3 and len(out.err.strip().splitlines()) == 1


def test_argument_errors(capsys):
    assert run(capsys, "iowef", "--n", "8")[0] == 2
    assert run(capsys, "iowef", "--n", "6", "--k", "2")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--system", "nope"])
    assert exc.value.code == 2


def test_numeric_exit_code(capsys):
    assert run(capsys, "design", "--n", "8", "--target", "1e-300")[0] == 4


def test_design(capsys, tmp_path):
    out_path = tmp_path / "d.csv"
    assert main(["design", "--n", "8", "--target", "1e-5", "-o", str(out_path)]) == 0
    lines = body(out_path.read_text())
    assert lines[0] == "K,rate,gamma_star_db,gamma_db,gap_db,memory"
    mem = [int(line.split(",")[-1]) for line in lines[1:]]
    assert len(mem) == 7 and sum(a == b for a, b in zip(mem, (11, 10, 6, 5, 5, 4, 2))) >= 6
    _, out = run(capsys, "design", "--n", "2")
    assert len(body(out.out)) == 2


def test_hex_helpers():
    bits = np.array([1, 0, 1, 1, 0, 0, 0, 1, 1, 1], dtype=np.uint8)
    text = bits_to_hex(bits)
    assert text == "b1c0"
    assert np.array_equal(hex_to_bits(text, 10), bits)
    with pytest.raises(ValueError):
        hex_to_bits("b1c1", 10)


def test_parse_sweep():
    assert parse_sweep("1:0.5:2") == [1.0, 1.5, 2.0]
    assert parse_sweep("3,4.5") == [3.0, 4.5]


def write_data(path, rng, L, k):
    data = rng.integers(0, 2, (L, k))
    path.write_text("".join(bits_to_hex(b) + "\n" for b in data))
    return data


@pytest.mark.parametrize("mk", [0, 1, 2])
def test_encode_decode_roundtrip(tmp_path, rng, mk):
    data_path = tmp_path / "data.hex"
    write_data(data_path, rng, 6, 16)
    coded, llr, decoded = tmp_path / "c.hex", tmp_path / "ch.txt", tmp_path / "out.hex"
    args = ["--n", "8", "--k", "4", "--b", "4", "--l", "6", "--m", "2", "--mk", str(mk), "--seed", "5"]
    assert main(["encode", *args, "-i", str(data_path), "-o", str(coded), "--llr-output", str(llr)]) == 0
    head = [line for line in coded.read_text().splitlines() if line.startswith("#")]
    for key in ("N: 8", "K: 4", "B: 4", "L: 6", "m: 2", f"m_K: {mk}", "seed: 5", "tool: bmst-ht"):
        assert any(key in line for line in head)
    assert len(body(coded.read_text())) == 6 + mk
    assert main(["decode", "-i", str(llr), "-o", str(decoded)]) == 0
    assert body(decoded.read_text()) == data_path.read_text().splitlines()


def test_decode_from_config_file(tmp_path, rng):
    data_path = tmp_path / "data.hex"
    write_data(data_path, rng, 4, 12)
    conf = tmp_path / "run.conf"
    conf.write_text("components = 4:1,4:1,4:2\nb = 3\nl = 4\nm = 1\nmk = 1\nseed = 2\n")
    llr = tmp_path / "ch.txt"
    assert main(["encode", "--config", str(conf), "-i", str(data_path), "-o", str(tmp_path / "c"),
                 "--llr-output", str(llr)]) == 0
    out = tmp_path / "u.hex"
    assert main(["decode", "--config", str(conf), "-i", str(llr), "-o", str(out)]) == 0
    assert body(out.read_text()) == data_path.read_text().splitlines()


def test_encode_rejects_wrong_block_count(tmp_path, rng, capsys):
    data_path = tmp_path / "data.hex"
    write_data(data_path, rng, 3, 16)
    code, out = run(capsys, "encode", "--n", "8", "--k", "4", "--b", "4", "--l", "6", "-i", str(data_path))
    assert code == 2 and "expected L=6" in out.err


def test_simulate_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--system", "ht", "--n", "8", "--k", "4", "--ebn0", "2:1:4",
            "--max-frames", "20000", "--seed", "7"]
    assert main(args + ["-o", str(a)]) == 0
    assert main(args + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert body(a.read_text())[0] == "ebn0_db,ber,frames,bit_errors"


def test_simulate_bmst_with_genie(tmp_path):
    out, genie = tmp_path / "b.csv", tmp_path / "g.csv"
    assert main(["simulate", "--system", "bmst", "--n", "8", "--k", "4", "--b", "4", "--l", "4",
                 "--m", "1", "--mk", "1", "--ebn0", "3,4", "--max-frames", "16", "--seed", "1",
                 "-o", str(out), "--genie-output", str(genie)]) == 0
    rows = body(genie.read_text())
    assert rows[0] == "ebn0_db,ber"
    assert [float(r.split(",")[0]) for r in rows[1:]] == pytest.approx([3.0, 4.0])
    assert "d: 2" in out.read_text()


def test_bound(tmp_path, capsys):
    code, out = run(capsys, "bound", "--n", "8", "--k", "1", "--ebn0", "9.6,10")
    assert code == 0
    first = body(out.out)[1].split(",")
    assert float(first[1]) == pytest.approx(9.736e-6, rel=1e-3)
    curve = tmp_path / "c.csv"
    curve.write_text("ebn0_db,ber\n5.0,0.01\n6.0,0.001\n")
    code, out = run(capsys, "bound", "--curve", str(curve), "--mk", "1")
    assert body(out.out)[1].startswith("1.9897,")
