import csv
import subprocess
import sys
import time
from pathlib import Path

import pytest

from rbtensor import io, video
from rbtensor.cli import main, parse_sizes
from rbtensor.tensor import ht_product

FIXTURES = Path(__file__).parent / "fixtures" / "frames"

def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))

@pytest.fixture
def clip(tmp_path):
    path = tmp_path / "clip.rbt"
    assert main(["synth", "--output", str(path), "--sizes", "16x16x4"]) == 0
    return path

def test_parse_sizes():
    assert parse_sizes("4x3x4, 6X6x4") == [(4, 3, 4), (6, 6, 4)]
    for bad in ("4x3", "0x1x1", "axbxc", ""):
        with pytest.raises(Exception):
            parse_sizes(bad)

def test_convert_round_trip(tmp_path):
    rbt = tmp_path / "v.rbt"
    assert main(["convert", "--input", str(FIXTURES), "--output", str(rbt)]) == 0
    assert io.read_tensor(rbt).shape == (5, 4, 3)
    out = tmp_path / "frames"
    assert main(["convert", "--input", str(rbt), "--output", str(out)]) == 0
    for src in io.frame_paths(FIXTURES):
        assert (out / src.name).read_bytes() == src.read_bytes()

def test_convert_rejects_corrupt(tmp_path, capsys):
    bad = tmp_path / "bad.rbt"
    data = bytearray(io.tensor_to_bytes(video.encode(io.read_frames(FIXTURES))))
    bad.write_bytes(b"RBT0" + bytes(data[4:]))
    assert main(["convert", "--input", str(bad), "--output", str(tmp_path / "o")]) == 2
    assert "byte offset 0" in capsys.readouterr().err
    bad.write_bytes(bytes(data[:-5]))
    assert main(["convert", "--input", str(bad), "--output", str(tmp_path / "o")]) == 2
    assert "length" in capsys.readouterr().err

def test_missing_input_exit_2(tmp_path):
    assert main(["convert", "--input", str(tmp_path / "none"), "--output", "x"]) == 2
    assert main(["compress", "--input", str(tmp_path / "none.rbt"), "--output",
                 str(tmp_path / "o.rbt"), "--k", "1"]) == 2
    assert main(["nonsense"]) == 2
    assert main([]) == 2

def test_compress_report(tmp_path, clip):
    report = tmp_path / "r.csv"
    out = tmp_path / "c.rbt"
    assert main(["compress", "--input", str(clip), "--output", str(out), "--k", "2",
                 "--report", str(report)]) == 0
    rows = read_csv(report)
    assert rows[0] == ["frame_index", "psnr_db"]
    assert [r[0] for r in rows[1:]] == ["0", "1", "2", "3"]
    assert all(float(r[1]) > 0 for r in rows[1:])
    assert b"\r\n" not in report.read_bytes()
    assert main(["compress", "--input", str(clip), "--output", str(out), "--k", "3",
                 "--report", str(report)]) == 0
    assert all(r[1] == "inf" for r in read_csv(report)[1:])

@pytest.mark.parametrize("k", ["0", "17", "-1"])
def test_compress_bad_k(tmp_path, clip, k, capsys):
    assert main(["compress", "--input", str(clip), "--output", str(tmp_path / "c.rbt"),
                 "--k", k]) == 2
    assert "[1, 16]" in capsys.readouterr().err

def test_deblur_end_to_end(tmp_path, clip, capsys):
    blurred = tmp_path / "b.rbt"
    assert main(["blur", "--input", str(clip), "--output", str(blurred)]) == 0
    report = tmp_path / "d.csv"
    out = tmp_path / "rec.rbt"
    t0 = time.perf_counter()
    code = main(["deblur", "--clean", str(clip), "--blurred", str(blurred), "--output", str(out),
                 "--report", str(report)])
    assert code == 0 and time.perf_counter() - t0 < 5
    rows = read_csv(report)
    assert rows[0] == ["psnr_db", "relative_error", "wall_seconds"]
    psnr, err, sec = map(float, rows[1])
    assert psnr >= 100 and err <= 1e-8 and sec >= 0
    _, clamped = video.decode_counted(io.read_tensor(out))
    assert clamped == 0

def test_deblur_shape_mismatch(tmp_path, clip):
    other = tmp_path / "o.rbt"
    assert main(["synth", "--output", str(other), "--sizes", "8x8x4"]) == 0
    assert main(["deblur", "--clean", str(clip), "--blurred", str(other),
                 "--output", str(tmp_path / "x.rbt")]) == 2

def test_metrics(tmp_path, clip, capsys):
    report = tmp_path / "m.csv"
    assert main(["metrics", "--input", str(clip), "--reference", str(clip),
                 "--report", str(report)]) == 0
    assert all(r[1] == "inf" for r in read_csv(report)[1:])
    assert "relative error 0.000000e+00" in capsys.readouterr().out

def test_blur_singular_exit_2(tmp_path, clip, capsys):
    assert main(["blur", "--input", str(clip), "--output", str(tmp_path / "b.rbt"),
                 "--kind", "motion", "--length", "2", "--coupling", "0"]) == 2
    assert "singular" in capsys.readouterr().err

def test_blur_matches_library(tmp_path, clip):
    out = tmp_path / "b.rbt"
    assert main(["blur", "--input", str(clip), "--output", str(out), "--sigma", "0.7"]) == 0
    t = io.read_tensor(clip)
    ref = ht_product(video.synth_blur(16, 4, sigma=0.7, coupling=0.1), t)
    assert video.relative_error(ref, io.read_tensor(out)) <= 1e-14

def test_synth_frames(tmp_path):
    out = tmp_path / "frames"
    assert main(["synth", "--output", str(out), "--sizes", "4x6x2", "--seed", "3"]) == 0
    assert io.read_frames(out).shape == (2, 4, 6, 3)

def test_verify_pass_and_mutation(tmp_path, capsys):
    report = tmp_path / "v.csv"
    assert main(["verify", "--seed", "1", "--sizes", "3x2x3", "--report", str(report)]) == 0
    out = capsys.readouterr().out
    assert "properties passed" in out
    rows = read_csv(report)
    assert rows[0][:2] == ["property", "n1"]
    assert all(r[-1] == "1" for r in rows[1:])
    assert main(["verify", "--sizes", "3x2x3", "--inject-dft-sign-bug"]) == 1
    err = capsys.readouterr().err
    assert "ht_product_dft_equivalence" in err

def test_bench_rows(tmp_path):
    report = tmp_path / "b.csv"
    assert main(["bench", "--sizes", "4x4x2,4x4x4", "--repeats", "2",
                 "--report", str(report)]) == 0
    rows = read_csv(report)
    assert rows[0] == ["n1", "n2", "n3", "method", "seconds"]
    from rbtensor.bench import methods
    assert len(rows) - 1 == 2 * 2 * len(methods())
    assert all(float(r[4]) >= 0 for r in rows[1:])

def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "rbtensor", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "verify" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "rbtensor", "metrics", "--input",
                           str(tmp_path / "a"), "--reference", str(tmp_path / "b")],
                          capture_output=True, text=True)
    assert proc.returncode == 2
