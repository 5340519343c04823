import pytest

from freespace.cli import CSV_HEADER, InsufficientData, fit_slope, growth_csv, growth_row, growth_svg, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def scene_file(tmp_path, capsys):
    path = tmp_path / "s.json"
    assert run(capsys, "gen", "random", "--m", "5", "--seed", "2", "--out", str(path))[0] == 0
    return str(path)


def test_gen_validate_gp(capsys, scene_file):
    assert run(capsys, "validate", scene_file)[1].strip() == "ok"
    code, out, _ = run(capsys, "gp-check", scene_file, "--robot", "square")
    assert code == 0 and out.strip() == "clean"


def test_count_methods_agree(capsys, scene_file, tmp_path):
    dump = tmp_path / "d.txt"
    _, brute, _ = run(capsys, "count", scene_file, "--robot", "square", "--method", "brute", "--no-timing")
    code, fast, err = run(capsys, "count", scene_file, "--robot", "square", "--dump", str(dump))
    assert code == 0 and brute == fast
    assert err.startswith("elapsed_ms")
    lines = dump.read_text().splitlines()
    assert len(lines) == int(fast) and all(line.count(" | ") == 2 for line in lines)


def test_classify_reports_totality(capsys, scene_file):
    code, out, _ = run(capsys, "classify", scene_file, "--robot", "square", "--no-timing")
    assert code == 0
    assert "EEE_NONPAR 0" in out and out.rstrip().endswith("unclassifiable 0")


def test_usage_and_input_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["count"])
    assert info.value.code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run(capsys, "validate", str(bad))[0] == 1
    assert run(capsys, "validate", str(tmp_path / "missing.json"))[0] == 1


def test_explain_bad_label(capsys, scene_file):
    assert run(capsys, "explain", scene_file, "--robot", "square", "--plane", "nonsense")[0] == 2


def test_envelope_stats(capsys):
    code, out, _ = run(capsys, "envelope-stats", "--m", "12", "--seed", "1")
    assert code == 0 and out.count("match yes") == 4


def test_fit_slope():
    rows = [(n, 3 * n * n) for n in (4, 8, 16, 32)]
    assert abs(fit_slope(rows).slope - 2) < 1e-9
    with pytest.raises(InsufficientData):
        fit_slope([(4, 1), (4, 2), (8, 0)])


def test_growth_outputs(tmp_path):
    rows = [growth_row("square", "structured", m, 0, timing=False) for m in (4, 6)]
    text = growth_csv(rows)
    assert text.splitlines()[0].split(",") == CSV_HEADER
    assert all(line.endswith(",0") for line in text.splitlines()[1:])
    svg = growth_svg(rows)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


COMMANDS = [
    ["gen", "fig1", "--m", "3"],
    ["gen", "quadratic", "--m", "2"],
    ["validate", "{scene}"],
    ["gp-check", "{scene}", "--robot", "triangle", "--full"],
    ["count", "{scene}", "--robot", "square"],
    ["count", "{scene}", "--robot", "triangle", "--method", "brute"],
    ["classify", "{scene}", "--robot", "hexagon"],
    ["envelope-stats", "--m", "9"],
    ["growth", "--robot", "square", "--sizes", "4,5", "--seeds", "0,1"],
    ["explain", "{scene}", "--robot", "square", "--plane", "R1.0@O0.1.0"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0] + "-" + a[1])
def test_no_timing_output_is_byte_identical(capsys, scene_file, argv):
    outs = []
    for threads in ("1", "1", "3"):
        args = [a.replace("{scene}", scene_file) for a in argv] + ["--no-timing", "--threads", threads]
        outs.append(run(capsys, *args))
    assert outs[0] == outs[1] == outs[2]
