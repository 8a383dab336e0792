import numpy as np
import pytest

from stclab.cli import main
from stclab.constellation import distance_spectrum
from stclab.designs import alamouti_generators, write_generator_file


def test_audit_all_passes(capsys):
    rc = main(["audit", "--which", "ALL", "--trials", "50", "--seed", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "audit.overall=PASS" in out
    for key in ("rh.base.pass=True", "rh.primed.pass=True",
                "rh.mixed.fails_as_expected=True", "theorem1.pass=True",
                "corollary1.pass=True", "invariance.pass=True",
                "forms.pass=True"):
        assert key in out


def test_audit_single_and_case_insensitive(capsys):
    rc = main(["audit", "--which", "rh"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "rh.mixed.worst_pair=0,1" in out
    assert "theorem1" not in out


def test_audit_bad_trials_is_usage_error(capsys):
    rc = main(["audit", "--trials", "0"])
    assert rc == 2
    assert "trials" in capsys.readouterr().err


def test_audit_generator_file_pass_and_fail(tmp_path, capsys):
    good = tmp_path / "good.txt"
    good.write_text(write_generator_file(alamouti_generators()))
    rc = main(["audit", "--which", "RH", "--generators", str(good)])
    out = capsys.readouterr().out
    assert rc == 0 and "rh.file.pass=True" in out

    g = alamouti_generators()
    bad = tmp_path / "bad.txt"
    from stclab.designs import make_generator_set
    broken = make_generator_set([g.basis[0], g.basis[0], g.basis[2], g.basis[3]])
    bad.write_text(write_generator_file(broken))
    rc = main(["audit", "--which", "RH", "--generators", str(bad)])
    out = capsys.readouterr().out
    assert rc == 1
    assert "rh.file.pass=False" in out
    assert "rh.file.worst_pair=0,1" in out
    assert "audit.overall=FAIL" in out


def test_audit_missing_file_is_exit_2(capsys):
    rc = main(["audit", "--which", "RH", "--generators", "/no/such/file.txt"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_simulate_stdout_and_file_agree_modulo_elapsed(tmp_path, capsys):
    args = ["simulate", "--mode", "uncoded", "--snr", "8", "--frames", "20",
            "--seed", "4", "--sections", "10"]
    rc = main(args)
    stdout_text = capsys.readouterr().out
    assert rc == 0
    out = tmp_path / "r.csv"
    rc = main(args + ["--out", str(out)])
    assert rc == 0

    def strip(text):
        return [ln.rsplit(",", 1)[0] for ln in text.splitlines()]

    assert strip(stdout_text) == strip(out.read_text())
    assert "snr_db,frames,bits" in stdout_text


def test_simulate_config_file_with_flag_override(tmp_path, capsys):
    cfgf = tmp_path / "sim.cfg"
    cfgf.write_text("mode=uncoded\nsnr_list_db=0\nframes_per_point=5\n"
                    "sections_per_frame=10\nbase_seed=1\n")
    rc = main(["simulate", "--config", str(cfgf), "--snr", "30"])
    out = capsys.readouterr().out
    assert rc == 0
    data = [ln for ln in out.splitlines() if ln and not ln.startswith("#")][1]
    assert data.startswith("30,5,")


def test_simulate_bad_mode_is_exit_2(capsys):
    cfg_err = main(["simulate", "--snr", "oops"])
    assert cfg_err == 2


def test_simulate_trellis_file(tmp_path, capsys):
    import importlib.resources
    text = importlib.resources.files("stclab.data").joinpath("trellis8.txt").read_text()
    tf = tmp_path / "t8.txt"
    tf.write_text(text)
    rc = main(["simulate", "--mode", "trellis", "--snr", "30", "--frames", "3",
               "--seed", "1", "--sections", "4", "--trellis", str(tf)])
    out = capsys.readouterr().out
    assert rc == 0
    data = [ln for ln in out.splitlines() if ln and not ln.startswith("#")][1]
    fields = data.split(",")
    assert fields[3] == "0", "30 dB trellis run must be error free"


def test_spectrum_matches_library(capsys):
    rc = main(["spectrum", "--which", "FULL"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "distance_sq,multiplicity"
    got = {float(a): int(b) for a, b in (ln.split(",") for ln in lines[1:])}
    assert got == distance_spectrum(which="FULL")


def test_show_constellation(capsys):
    rc = main(["show-constellation"])
    out = capsys.readouterr().out
    assert rc == 0
    body = [ln for ln in out.splitlines() if ln and not ln.startswith("idx")]
    assert len(body) == 32
    assert body[0].split()[0] == "0"
    assert "PRIMED" in out and "BASE" in out
