import json

from mukailat.cli import main


def test_lattice_info(capsys):
    assert main(["lattice", "info", "Mukai", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["rank"] == 24 and out["signature"] == [4, 20]


def test_lattice_info_unknown(capsys):
    assert main(["lattice", "info", "Nope"]) == 1


def test_delta_find(capsys):
    assert main(["delta", "find", "--d", "3", "--v", "1,0,-1", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["n"] == 2 and out["theta_order"] == 2


def test_eichler_reduce(capsys):
    coords = ",".join(["1", "0", "2", "3"] + ["0"] * 20)
    assert main(["eichler", "reduce", "--coords", coords, "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["canonical"][0] == 1


def test_equiv_decide_and_cert_verify(tmp_path, capsys):
    cert_file = tmp_path / "cert.json"
    rc = main(["equiv", "decide", "--d", "3", "--v", "1,0,-1",
               "--w", "2,1,1", "-o", str(cert_file), "--json"])
    assert rc == 0
    obj = json.loads(cert_file.read_text())
    assert obj["verdict"] == "criterion-case-1"
    capsys.readouterr()
    assert main(["cert", "verify", str(cert_file)]) == 0
    out = capsys.readouterr().out
    assert "VERIFIED" in out


def test_cert_verify_rejects_tampered(tmp_path, capsys):
    cert_file = tmp_path / "cert.json"
    main(["equiv", "decide", "--d", "3", "--v", "1,0,-1",
          "--w", "2,1,1", "-o", str(cert_file)])
    obj = json.loads(cert_file.read_text())
    obj["delta_v"] = [c + 1 for c in obj["delta_v"]]
    cert_file.write_text(json.dumps(obj))
    capsys.readouterr()
    assert main(["cert", "verify", str(cert_file)]) == 2


def test_selftest():
    assert main(["selftest", "--seed", "3"]) == 0


def test_invalid_input_exit_code():
    assert main(["equiv", "decide", "--d", "0", "--v", "1,0,-1",
                 "--w", "1,0,-1"]) == 1
