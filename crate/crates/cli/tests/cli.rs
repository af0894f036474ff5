use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prime-spin")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn header(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o).lines().next().unwrap().to_string()
}

#[test]
fn golden_headers() {
    assert_eq!(header(&["primes", "--max-norm", "50"]), "p,f,e,r,norm");
    assert_eq!(header(&["spins", "--max-norm", "50"]), "p,r,norm,gen_coords,spin_k1,spin_k2");
    assert_eq!(header(&["spins", "--max-norm", "50", "--k", "2"]), "p,r,norm,gen_coords,spin_k2");
    assert_eq!(header(&["domain-count", "--max-norm", "300", "--mod-norm", "7"]), "X,ideal_norm,class,count,expected,residual");
    assert_eq!(header(&["quad-spins", "--d", "13", "--max-norm", "500"]), "p,beta,spin_direct,spin_formula,agree");
    assert_eq!(header(&["selmer-scan", "--max-p", "100"]), "p,qualified,spin,predicted_dim,failure_reason");
    assert_eq!(header(&["spin-sum", "--max-norm", "1000"]), "x,k,prime_count,sum,mean,exponent,weighted");
    assert_eq!(header(&["vaughan-verify", "--max-norm", "100"]), "x,y,z,sequence,identity_holds,s_x,s_z,s1,s2,s3");
    assert_eq!(header(&["char-scan", "--max-norm", "100"]), "q,odd_support,window,max_abs,argmax,ratio");
}

#[test]
fn spins_up_to_norm_13() {
    let o = run(&["spins", "--field", "shanks:1", "--max-norm", "13"]);
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    let norms: Vec<&str> = rows.iter().map(|r| r[2]).collect();
    assert_eq!(norms, ["7", "8", "13", "13", "13"]);
    // the three conjugates above 13 share their spins; 7 and 2 carry zeros
    assert!(rows[2..].iter().all(|r| r[4..] == rows[2][4..] && r[4] != "0"));
    assert_eq!(&rows[0][4..], ["0", "0"]);
}

#[test]
fn output_is_worker_count_independent() {
    for args in [
        &["spins", "--max-norm", "20000"][..],
        &["spins", "--max-norm", "20000", "--mod8", "1,0,0", "--format", "json"],
        &["selmer-scan", "--max-p", "5000"],
        &["char-scan", "--max-norm", "500"],
        &["vaughan-verify", "--max-norm", "400", "--seed", "9"],
        &["domain-count", "--max-norm", "2000", "--mod-norm", "13"],
    ] {
        let one = run(&[args, &["--workers", "1"]].concat());
        let eight = run(&[args, &["--workers", "8"]].concat());
        assert_eq!(one.status.code(), Some(0), "{args:?}");
        assert_eq!(one.stdout, eight.stdout, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["spins", "--max-norm", "ten"]).status.code(), Some(1));
    assert_eq!(run(&["spins", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(run(&["spins", "--k", "3"]).status.code(), Some(1));
    for (args, kind) in [
        (&["spins", "--max-norm", "100000000000000000000000"][..], "CostGuard"),
        (&["symbol", "--upper", "3,1,0", "--lower", "2:0"], "EvenModulus"),
        (&["spins", "--field", "lehmer:1", "--max-norm", "100"], "Unsupported"),
        (&["quad-spins", "--d", "7"], "EvenDiscriminant"),
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err: serde_json::Value = serde_json::from_slice(&o.stderr).expect("structured error");
        assert_eq!(err["error"], kind, "{args:?}");
    }
}

#[test]
fn symbol_values() {
    let s = |lower: &str| stdout(&run(&["symbol", "--upper", "3,1,0", "--lower", lower])).trim().to_string();
    let v = s("13:0");
    assert!(v == "1" || v == "-1");
    // an ideal containing the upper entry gives 0
    let o = run(&["symbol", "--upper", "7,0,0", "--lower", "7:0"]);
    assert_eq!(stdout(&o).trim(), "0");
    // multiplicativity over a product of primes
    let a: i32 = s("13:0").parse().unwrap();
    let b: i32 = s("29:1").parse().unwrap();
    let ab: i32 = s("13:0*29:1").parse().unwrap();
    assert_eq!(ab, a * b);
}

#[test]
fn config_file_with_flag_override() {
    let dir = env!("CARGO_TARGET_TMPDIR");
    let path = format!("{dir}/run.conf");
    std::fs::write(&path, "# spins config\nfield = shanks:1\nmax-norm = 13\nformat = csv\n").unwrap();
    let from_file = stdout(&run(&["spins", "--config", &path]));
    assert_eq!(from_file, stdout(&run(&["spins", "--max-norm", "13"])));
    let overridden = stdout(&run(&["spins", "--config", &path, "--max-norm", "8"]));
    assert_eq!(overridden.lines().count(), 3);
    std::fs::write(&path, "bogus = 1\n").unwrap();
    assert_eq!(run(&["spins", "--config", &path]).status.code(), Some(1));
}

#[test]
fn json_format() {
    let o = run(&["spin-sum", "--max-norm", "5000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][0]["x"], 5000);
    assert!(v["rows"][0]["prime_count"].as_i64().unwrap() > 0);
    assert_eq!(v["summary"]["generator_failures"], 0);
    let f: serde_json::Value = serde_json::from_slice(&run(&["field-info"]).stdout).unwrap();
    assert_eq!(f["maximal_order_verified"], true);
    assert_eq!(f["field_discriminant"], "49");
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().skip(1).all(|l| l.split(',').nth(1) == Some("true")));
}
