use std::cell::Cell;
use std::fmt;
use std::io::Read;

use serde_json::{json, Value};

use gsg_core::complements::{
    abelian_complement_report, first_coset_representatives, phi_alpha_matrix,
    symmetric_isotope_search, SymmetricIsotope,
};
use gsg_core::embed::{embed_class_two, pad, verify_embedding, Class2Data};
use gsg_core::format::{
    parse_class2, parse_map, parse_map_or_group, write_group, write_map, write_witness,
};
use gsg_core::isotopy::{
    check_isotopism, extract_alpha, extract_maps, search_isotopism, ExtractionBasis, IsotopyKind,
    SearchOutcome,
};
use gsg_core::oracle::{
    build_table, complement_census, cross_validate, default_axiom_mode, AxiomMode,
    EXHAUSTIVE_AXIOM_CAP,
};
use gsg_core::{BilinearMap, Budget, Error, FieldParams, GroupSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

pub struct Outcome {
    pub status: Status,
    /// Standard output in text mode.
    pub text: String,
    /// Standard error lines in text mode.
    pub notes: Vec<String>,
    pub results: Value,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
}

impl CliError {
    /// 3 for budget refusals, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

thread_local! {
    static STDIN_USED: Cell<bool> = const { Cell::new(false) };
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        if STDIN_USED.with(|u| u.replace(true)) {
            return Err(CliError::Io("standard input can only be read once".into()));
        }
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(format!("reading standard input: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {path}: {e}")))
    }
}

fn with_path<T>(path: &str, r: gsg_core::Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, message } => CliError::Io(format!("{path}:{line}: {message}")),
        other => CliError::Core(other),
    })
}

fn load_map(path: &str) -> Result<BilinearMap> {
    with_path(path, parse_map(&read_input(path)?))
}

/// `alpha` from a map or group file, `beta` from `--beta`, the group file, or
/// zero.
fn load_pair(alpha: &str, beta: Option<&str>) -> Result<(BilinearMap, BilinearMap)> {
    let (a, embedded) = with_path(alpha, parse_map_or_group(&read_input(alpha)?))?;
    let b = match (beta, embedded) {
        (Some(path), _) => load_map(path)?,
        (None, Some(b)) => b,
        (None, None) => BilinearMap::zero(a.fp(), a.n(), a.m()),
    };
    if !a.same_shape(&b) {
        return Err(
            Error::DimensionMismatch("beta must share p, n and m with alpha".into()).into(),
        );
    }
    Ok((a, b))
}

fn write_or_return(output: Option<&str>, text: String) -> Result<String> {
    match output {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| CliError::Io(format!("writing {path}: {e}")))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn rows(map: &BilinearMap) -> Value {
    json!(map
        .slices()
        .iter()
        .map(|s| (0..s.rows()).map(|r| s.row(r).to_vec()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

pub fn gen_field(p: u64, n: usize, m: usize, output: Option<&str>) -> Result<Outcome> {
    let fp = FieldParams::new(p)?;
    let map = BilinearMap::field_quotient_map(fp, n, m)?;
    let text = write_map(&map);
    Ok(Outcome {
        status: Status::Pass,
        results: json!({ "map": text }),
        text: write_or_return(output, text)?,
        notes: vec![],
    })
}

pub fn check(path: &str, budget: u128) -> Result<Outcome> {
    let map = load_map(path)?;
    let nonsingular = map.is_nonsingular(Budget(budget))?;
    let (symmetric, alternating) = (map.is_symmetric(), map.is_alternating());
    Ok(Outcome {
        status: Status::from_bool(nonsingular),
        text: format!(
            "nonsingular={nonsingular}\nsymmetric={symmetric}\nalternating={alternating}\n"
        ),
        notes: vec![],
        results: json!({
            "nonsingular": nonsingular,
            "symmetric": symmetric,
            "alternating": alternating,
        }),
    })
}

pub fn group_verify(alpha: &str, beta: Option<&str>, budget: u128) -> Result<Outcome> {
    let (a, b) = load_pair(alpha, beta)?;
    let budget = Budget(budget);
    if !a.is_nonsingular(budget)? {
        return Ok(Outcome {
            status: Status::Fail,
            text: "nonsingular=false\nsemi_extraspecial=false\n".into(),
            notes: vec![],
            results: json!({ "nonsingular": false, "semi_extraspecial": false }),
        });
    }
    let p = a.fp().p() as u64;
    let spec = GroupSpec::new(a, b, budget)?;
    let ses = spec.verify_ses(budget)?;
    let exponent = match spec.exponent(budget) {
        Ok(e) => Some(e),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    // odd p forces exponent p; p = 2 only bounds it by 4
    let exponent_ok = match exponent {
        Some(e) if p == 2 => 4 % e == 0,
        Some(e) => e == p,
        None => true,
    };
    let mut text = format!(
        "nonsingular=true\nsemi_extraspecial={}\nultraspecial={}\norder=p^{}\n",
        ses.holds,
        spec.is_ultraspecial(),
        spec.order_log()
    );
    match exponent {
        Some(e) => text.push_str(&format!("exponent={e}\n")),
        None => text.push_str("exponent=skipped\n"),
    }
    if let Some((x, y)) = &ses.witness_of_failure {
        text.push_str(&format!("failure_a={x}\nfailure_b={y}\n"));
    }
    Ok(Outcome {
        status: Status::from_bool(ses.holds && exponent_ok),
        text,
        notes: vec![],
        results: json!({
            "nonsingular": true,
            "semi_extraspecial": ses.holds,
            "ultraspecial": spec.is_ultraspecial(),
            "order_log": spec.order_log(),
            "exponent": exponent,
            "failure": ses.witness_of_failure.map(|(x, y)| (x.coords().to_vec(), y.coords().to_vec())),
        }),
    })
}

pub fn complements(alpha: &str, beta: Option<&str>) -> Result<Outcome> {
    let (a, b) = load_pair(alpha, beta)?;
    let report = abelian_complement_report(&a, &b)?;
    let results = serde_json::to_value(&report).expect("report serializes");
    Ok(Outcome {
        status: Status::Pass,
        text: format!(
            "{}\n",
            serde_json::to_string_pretty(&results).expect("value serializes")
        ),
        notes: vec![],
        results,
    })
}

pub fn cosets(alpha: &str, limit: usize) -> Result<Outcome> {
    let a = load_map(alpha)?;
    let report = first_coset_representatives(&a, limit)?;
    let reps: Vec<Vec<u32>> = report
        .representatives
        .iter()
        .map(|r| r.coords.clone())
        .collect();
    let mut text = format!(
        "cosets={}\nimage_dim={}\nalt_dim={}\n",
        report.coset_count, report.image_dim, report.alt_dim
    );
    for r in &reps {
        let line: Vec<String> = r.iter().map(u32::to_string).collect();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    Ok(Outcome {
        status: Status::Pass,
        text,
        notes: vec![],
        results: json!({
            "coset_count": report.coset_count,
            "image_dim": report.image_dim,
            "alt_dim": report.alt_dim,
            "representatives": reps,
        }),
    })
}

pub fn isotopic(
    a1: &str,
    a2: &str,
    anti: bool,
    budget: u128,
    output: Option<&str>,
) -> Result<Outcome> {
    let (m1, m2) = (load_map(a1)?, load_map(a2)?);
    let kind = if anti {
        IsotopyKind::AntiIsotopism
    } else {
        IsotopyKind::Isotopism
    };
    let outcome = search_isotopism(&m1, &m2, kind, budget)?;
    let results = serde_json::to_value(&outcome).expect("outcome serializes");
    Ok(match outcome {
        SearchOutcome::Found { witness, .. } => Outcome {
            status: Status::Pass,
            text: write_or_return(output, write_witness(&witness, m1.fp().p()))?,
            notes: vec![],
            results,
        },
        SearchOutcome::Exhausted { visited } => Outcome {
            status: Status::Fail,
            text: format!("none\nvisited={visited}\n"),
            notes: vec![],
            results,
        },
        SearchOutcome::Inconclusive { visited } => Outcome {
            status: Status::Inconclusive,
            text: format!("inconclusive\nvisited={visited}\n"),
            notes: vec![],
            results,
        },
    })
}

pub fn extract(
    alpha: &str,
    beta: Option<&str>,
    seed: u64,
    witness: Option<&str>,
) -> Result<Outcome> {
    let (a, b) = load_pair(alpha, beta)?;
    let (fp, n, m) = (a.fp(), a.n(), a.m());
    let spec = GroupSpec::new(a, b, Budget::default())?;
    let basis = ExtractionBasis::random(fp, n, m, seed);
    let (alpha2, beta2, iso) = if fp.p() == 2 {
        if !spec.beta().is_zero() {
            return Err(Error::InvalidArgument("beta extraction needs odd p".into()).into());
        }
        let (a2, w) = extract_alpha(&spec, &basis)?;
        (a2, None, w)
    } else {
        let ex = extract_maps(&spec, &basis)?;
        (ex.alpha, Some(ex.beta), ex.witness)
    };
    let verified = check_isotopism(&alpha2, spec.alpha(), &iso)?;
    let text = match &beta2 {
        Some(b2) => write_group(&alpha2, b2),
        None => write_map(&alpha2),
    };
    let witness_text = write_witness(&iso, fp.p());
    if let Some(path) = witness {
        write_or_return(Some(path), witness_text.clone())?;
    }
    Ok(Outcome {
        status: Status::from_bool(verified),
        notes: vec![format!("witness_verified={verified}")],
        results: json!({
            "alpha": rows(&alpha2),
            "beta": beta2.as_ref().map(rows),
            "witness": witness_text,
            "witness_verified": verified,
        }),
        text,
    })
}

pub fn embed(gamma: &str, alpha: Option<&str>, output: Option<&str>) -> Result<Outcome> {
    let text = read_input(gamma)?;
    let data = if text.lines().any(|l| l.trim() == "kind=class2") {
        with_path(gamma, parse_class2(&text))?
    } else {
        Class2Data::new(with_path(gamma, parse_map(&text))?)?
    };
    let padded = pad(&data);
    let alpha = alpha.map(load_map).transpose()?;
    let spec = embed_class_two(&padded, alpha.as_ref())?;
    let verified = verify_embedding(&spec, &data);
    let file = write_group(spec.alpha(), spec.beta());
    Ok(Outcome {
        status: Status::from_bool(verified),
        notes: vec![format!("verify_embedding={verified}")],
        results: json!({
            "group": file,
            "n": spec.n(),
            "m": spec.m(),
            "ultraspecial": spec.is_ultraspecial(),
            "verify_embedding": verified,
        }),
        text: write_or_return(output, file)?,
    })
}

pub fn oracle(alpha: &str, beta: Option<&str>, exhaustive: bool, seed: u64) -> Result<Outcome> {
    let (a, b) = load_pair(alpha, beta)?;
    let spec = GroupSpec::new(a, b, Budget::default())?;
    let table = build_table(&spec)?;
    let mode = if exhaustive {
        AxiomMode::Exhaustive
    } else {
        default_axiom_mode(&table, seed)
    };
    let report = cross_validate(&spec, mode)?;
    let census = if table.order() <= EXHAUSTIVE_AXIOM_CAP {
        let predicted = abelian_complement_report(spec.alpha(), spec.beta())?.count;
        Some((complement_census(&table)? as u128, predicted))
    } else {
        None
    };
    let census_ok = census.is_none_or(|(c, p)| c == p);
    let p = spec.fp().p() as u64;
    let exponent_ok = if p == 2 {
        4 % report.exponent == 0
    } else {
        report.exponent == p
    };
    let passed = report.passed() && census_ok && exponent_ok;
    let mut text = format!(
        "order={}\nlatin={}\nassociative={}\ntriples_checked={}\ncenter_matches={}\nderived_equals_center={}\nexponent={}\nformulas_agree={}\nhyperplanes={}\nextraspecial_quotients={}\n",
        report.order,
        report.latin,
        report.axioms.holds,
        report.axioms.triples_checked,
        report.center_matches,
        report.derived_equals_center,
        report.exponent,
        report.formulas_agree,
        report.extraspecial.hyperplanes,
        report.extraspecial.all_extraspecial,
    );
    if let Some((c, p)) = census {
        text.push_str(&format!("complement_census={c}\ncomplement_formula={p}\n"));
    }
    text.push_str(&format!("passed={passed}\n"));
    let mut results = serde_json::to_value(&report).expect("report serializes");
    results["complement_census"] = json!(census.map(|(c, p)| json!({ "census": c, "formula": p })));
    results["passed"] = json!(passed);
    Ok(Outcome {
        status: Status::from_bool(passed),
        text,
        notes: vec![],
        results,
    })
}

pub fn sym_isotope(alpha: &str, budget: u128, seed: u64) -> Result<Outcome> {
    let a = load_map(alpha)?;
    let kernel_dim = phi_alpha_matrix(&a).kernel_dim;
    let outcome = symmetric_isotope_search(&a, budget, seed)?;
    let mut results = serde_json::to_value(&outcome).expect("outcome serializes");
    results["kernel_dim"] = json!(kernel_dim);
    Ok(match outcome {
        SymmetricIsotope::Found { f, .. } => {
            let sym = gsg_core::complements::alpha_f(&a, &f)?;
            let mut text = String::from("[f]\n");
            for r in 0..f.matrix().rows() {
                let row: Vec<String> = f.matrix().row(r).iter().map(u32::to_string).collect();
                text.push_str(&row.join(" "));
                text.push('\n');
            }
            text.push_str("\n[alpha_f]\n");
            text.push_str(&write_map(&sym));
            Outcome {
                status: Status::Pass,
                text,
                notes: vec![],
                results,
            }
        }
        SymmetricIsotope::None => Outcome {
            status: Status::Fail,
            text: "none\n".into(),
            notes: vec![],
            results,
        },
        SymmetricIsotope::Inconclusive { sampled } => Outcome {
            status: Status::Inconclusive,
            text: format!("inconclusive\nsampled={sampled}\n"),
            notes: vec![],
            results,
        },
    })
}
