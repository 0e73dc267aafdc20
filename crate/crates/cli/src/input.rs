//! Loading inputs from files, standard input or named fixtures.

use std::io::Read;
use std::path::PathBuf;

use clap::Args;
use hermitia::fixtures;
use hermitia::json::{complex_to_value, ensemble_to_value, parse_document, Document, TensorKind};
use hermitia::ptrace::hermitianize;
use hermitia::quantum::density_tensor;
use hermitia::tensor::HERMITICITY_TOL;
use hermitia::{Error, HermitianTensor};

/// Fixture parameters shared by `fixture` and `--fixture`.
#[derive(Debug, Clone, Args)]
pub struct FixtureParams {
    /// Weight of the first state for example-6.2.
    #[arg(long, default_value_t = 0.5)]
    pub rho1: f64,
    /// Weight of the second state for example-6.2.
    #[arg(long, default_value_t = 0.5)]
    pub rho2: f64,
    /// Mode dimensions for rank-one and separable, e.g. 2,2,2.
    #[arg(long, value_delimiter = ',', default_value = "2,2")]
    pub dims: Vec<usize>,
    /// Number of product terms for separable.
    #[arg(long, default_value_t = 2)]
    pub terms: usize,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input JSON file, or "-" for standard input.
    #[arg(long, value_name = "PATH", conflicts_with = "fixture", required_unless_present = "fixture")]
    pub input: Option<PathBuf>,
    /// Use a built-in fixture instead of a file.
    #[arg(long, value_name = "NAME")]
    pub fixture: Option<String>,
    #[command(flatten)]
    pub params: FixtureParams,
}

/// A loaded document plus the bytes its digest is taken over.
pub struct Loaded {
    pub bytes: Vec<u8>,
    pub document: Document,
}

/// How an analysis input was turned into a Hermitian tensor.
#[derive(Debug, Clone, Copy)]
pub enum Origin {
    Hermitian,
    PureState,
    Ensemble,
}

impl Origin {
    pub fn label(self) -> &'static str {
        match self {
            Origin::Hermitian => "hermitian",
            Origin::PureState => "complex (hermitianized)",
            Origin::Ensemble => "ensemble (density tensor)",
        }
    }
}

/// Fixture document as pretty JSON, exactly as `fixture` prints it.
pub fn fixture_json(name: &str, p: &FixtureParams, seed: u64) -> Result<String, String> {
    build_fixture(name, p, seed).map_err(|e| match e {
        Error::UnknownFixture(_) => format!("{e}; known fixtures: {}", fixtures::FIXTURE_NAMES.join(", ")),
        other => other.to_string(),
    })
}

fn build_fixture(name: &str, p: &FixtureParams, seed: u64) -> hermitia::Result<String> {
    let value = match name {
        "example-3.2" => complex_to_value(&fixtures::example_3_2()),
        "example-3.4" => complex_to_value(&fixtures::example_3_4()),
        "example-6.2" => ensemble_to_value(&fixtures::example_6_2(p.rho1, p.rho2)?),
        "rank-one" => complex_to_value(&fixtures::rank_one(&p.dims, seed)?),
        "separable" => ensemble_to_value(&fixtures::separable(&p.dims, p.terms, seed)?),
        other => return Err(Error::UnknownFixture(other.to_string())),
    };
    Ok(serde_json::to_string_pretty(&value).expect("plain data"))
}

pub fn load(args: &InputArgs, seed: u64) -> Result<Loaded, String> {
    let bytes = match (&args.fixture, &args.input) {
        (Some(name), _) => fixture_json(name, &args.params, seed)?.into_bytes(),
        (None, Some(path)) if path.as_os_str() == "-" => {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| format!("reading standard input: {e}"))?;
            buf
        }
        (None, Some(path)) => {
            std::fs::read(path).map_err(|e| format!("reading {}: {e}", path.display()))?
        }
        (None, None) => return Err("one of --input or --fixture is required".into()),
    };
    let text = std::str::from_utf8(&bytes).map_err(|e| format!("input is not UTF-8: {e}"))?;
    let document = parse_document(text).map_err(|e| e.to_string())?;
    Ok(Loaded { bytes, document })
}

/// Hermitian tensor for the analysis commands: complex input is a pure
/// state and is hermitianized, an ensemble becomes its density tensor.
pub fn hermitian(doc: &Document) -> Result<(HermitianTensor, Origin), String> {
    match doc {
        Document::Ensemble(e) => Ok((density_tensor(e), Origin::Ensemble)),
        Document::Tensor(t) => match t.kind {
            TensorKind::Hermitian => t
                .hermitian(HERMITICITY_TOL)
                .map(|h| (h, Origin::Hermitian))
                .map_err(|e| e.to_string()),
            TensorKind::Complex => Ok((hermitianize(&t.array), Origin::PureState)),
        },
    }
}
