//! The `qsig` command line.
//!
//! Exit codes: 0 success or valid, 1 invalid signature, 2 usage or bad
//! input, 3 I/O failure, 4 malformed envelope. Every failure prints one line
//! on stderr of the form `error[<code>]: <message>` (or `invalid[<code>]`
//! for a verification that ran but did not pass).

use std::ffi::OsString;
use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::bounds::{self, applicable_bound, BoundReport};
use crate::codec;
use crate::error::{DecodeError, Error};
use crate::hash::{hash_by_id, DEFAULT_HASH_ID};
use crate::index_set::IndexSet;
use crate::quoter;
use crate::sigscheme::{keygen, PublicKey, SecretKey, ED25519};
use crate::tokenizer::{
    render_quote, strip_markers, tokenizer_by_id, DEFAULT_MARKER, WHITESPACE_V1,
};
use crate::verifier::{self, gaps, Failure};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_MALFORMED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "qsig",
    version,
    about = "Sign texts once, quote them with verifiable signatures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a key pair.
    Keygen(KeygenArgs),
    /// Sign a whole message.
    Sign(SignArgs),
    /// Extract a quote and its signature from a signed message or quote.
    Quote(QuoteArgs),
    /// Verify a quote against its signature and a public key.
    Verify(VerifyArgs),
    /// Print path-size bounds, optionally checked by brute force.
    Bounds(BoundsArgs),
    /// Dump the fields of a signature envelope.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct KeygenArgs {
    #[arg(long)]
    pub secret: PathBuf,
    #[arg(long)]
    pub public: PathBuf,
    #[arg(long, default_value = ED25519)]
    pub scheme: String,
    /// Overwrite existing key files.
    #[arg(long)]
    pub force: bool,
    /// Derive the key from a seed instead of OS randomness (testing only).
    #[arg(long, hide = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SignArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value = DEFAULT_HASH_ID)]
    pub hash: String,
    #[arg(long, default_value = WHITESPACE_V1)]
    pub tokenizer: String,
}

#[derive(Debug, Args)]
pub struct QuoteArgs {
    /// The signed message, or a rendered quote when `--sig` is a quote envelope.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub sig: PathBuf,
    /// Half-open token range `a..b`, 0-based. Repeatable.
    #[arg(long = "range", value_parser = parse_range)]
    pub ranges: Vec<Range<usize>>,
    /// Comma-separated 0-based token indices.
    #[arg(long, value_delimiter = ',')]
    pub tokens: Vec<usize>,
    #[arg(long)]
    pub out_text: PathBuf,
    #[arg(long)]
    pub out_sig: PathBuf,
    /// Verify the input signature with this key before quoting.
    #[arg(long = "pub")]
    pub public: Option<PathBuf>,
    #[arg(long, env = "QSIG_MARKER", default_value = DEFAULT_MARKER)]
    pub marker: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub quote: PathBuf,
    #[arg(long)]
    pub sig: PathBuf,
    #[arg(long = "pub")]
    pub public: PathBuf,
    /// Also write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, env = "QSIG_MARKER", default_value = DEFAULT_MARKER)]
    pub marker: String,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: usize,
    /// Quote length; all of 1..=n when omitted.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub contiguous: bool,
    /// Check the bound by enumerating every quote.
    #[arg(long, conflicts_with = "sample")]
    pub exhaustive: bool,
    /// Check the bound on this many random quotes instead.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub sig: PathBuf,
}

fn parse_range(s: &str) -> Result<Range<usize>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got `{s}`"))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|e| format!("bad range start: {e}"))?;
    let b: usize = b
        .trim()
        .parse()
        .map_err(|e| format!("bad range end: {e}"))?;
    if a >= b {
        return Err(format!("empty range `{s}`"));
    }
    Ok(a..b)
}

#[derive(Debug)]
struct Failed {
    exit: i32,
    code: &'static str,
    message: String,
}

impl Failed {
    fn new(exit: i32, code: &'static str, message: impl Into<String>) -> Self {
        Failed {
            exit,
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failed {
    fn from(e: Error) -> Self {
        let (exit, code) = match &e {
            Error::NoTokens => (EXIT_USAGE, "no-tokens"),
            Error::EmptyToken => (EXIT_USAGE, "empty-token"),
            Error::UnknownHash(_) => (EXIT_USAGE, "unknown-hash"),
            Error::UnknownScheme(_) => (EXIT_USAGE, "unknown-scheme"),
            Error::UnknownTokenizer(_) => (EXIT_USAGE, "unknown-tokenizer"),
            Error::InvalidKey(_) => (EXIT_USAGE, "invalid-key"),
            Error::SchemeMismatch { .. } => (EXIT_USAGE, "scheme-mismatch"),
            Error::EmptyIndexSet => (EXIT_USAGE, "empty-selection"),
            Error::IndexOutOfRange { .. } => (EXIT_USAGE, "index-out-of-range"),
            Error::LengthMismatch { .. } => (EXIT_INVALID, "length-mismatch"),
            Error::NotFullSignature => (EXIT_USAGE, "not-full-signature"),
            Error::HashMismatch { .. } => (EXIT_USAGE, "hash-mismatch"),
            Error::Malformed(m) => (EXIT_MALFORMED, m.code()),
            Error::Decode(DecodeError::KeyHeader) => (EXIT_USAGE, "key-header"),
            Error::Decode(d) => (EXIT_MALFORMED, d.code()),
            Error::Unlabeled(_) => (EXIT_MALFORMED, "unlabeled"),
            Error::Domain(_) => (EXIT_USAGE, "domain"),
            Error::LimitExceeded { .. } => (EXIT_USAGE, "limit-exceeded"),
            Error::BoundViolated { .. } => (EXIT_INVALID, "bound-violated"),
            Error::SlackExceeded { .. } => (EXIT_INVALID, "slack-exceeded"),
            Error::Io(_) => (EXIT_IO, "io"),
        };
        let mut message = e.to_string();
        if let Error::LimitExceeded { .. } = e {
            message.push_str(" (pass --sample N)");
        }
        Failed::new(exit, code, message)
    }
}

impl From<DecodeError> for Failed {
    fn from(e: DecodeError) -> Self {
        Failed::new(EXIT_MALFORMED, e.code(), e.to_string())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failed> {
    std::fs::read(path).map_err(|e| Failed::new(EXIT_IO, "io", format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failed> {
    String::from_utf8(read(path)?).map_err(|_| {
        Failed::new(
            EXIT_USAGE,
            "invalid-utf8",
            format!("{}: not valid UTF-8", path.display()),
        )
    })
}

fn write(path: &Path, data: &[u8]) -> Result<(), Failed> {
    std::fs::write(path, data)
        .map_err(|e| Failed::new(EXIT_IO, "io", format!("{}: {e}", path.display())))
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let exit = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if exit == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let first = text
                    .lines()
                    .next()
                    .unwrap_or("usage error")
                    .trim_start_matches("error: ");
                let _ = writeln!(err, "error[usage]: {first}");
                let _ = write!(err, "{text}");
            }
            return exit;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error[{}]: {}", f.code, f.message);
            f.exit
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failed> {
    match cmd {
        Command::Keygen(a) => cmd_keygen(a).map(|_| EXIT_OK),
        Command::Sign(a) => cmd_sign(a, out).map(|_| EXIT_OK),
        Command::Quote(a) => cmd_quote(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Inspect(a) => {
            let sig = codec::decode(&read(&a.sig)?)?;
            let _ = write!(out, "{}", codec::describe(&sig));
            Ok(EXIT_OK)
        }
    }
}

fn cmd_keygen(a: KeygenArgs) -> Result<(), Failed> {
    if !a.force {
        for p in [&a.secret, &a.public] {
            if p.exists() {
                return Err(Failed::new(
                    EXIT_IO,
                    "exists",
                    format!("{} exists; pass --force to overwrite", p.display()),
                ));
            }
        }
    }
    let key = match a.seed {
        Some(seed) => keygen(&a.scheme, &mut ChaCha20Rng::seed_from_u64(seed))?,
        None => keygen(&a.scheme, &mut rand::rngs::OsRng)?,
    };
    write(&a.secret, &key.secret.to_file_bytes())?;
    write(&a.public, &key.public.to_file_bytes())?;
    Ok(())
}

fn cmd_sign(a: SignArgs, out: &mut dyn Write) -> Result<(), Failed> {
    let hash = hash_by_id(&a.hash)?;
    let tokenizer = tokenizer_by_id(&a.tokenizer)?;
    let secret = SecretKey::from_file_bytes(&read(&a.key)?)?;
    let message = tokenizer.tokenize(&read_text(&a.input)?)?;
    let sig = quoter::sign_with(hash, &message, &secret, tokenizer.id())?;
    write(&a.output, &codec::encode(&sig))?;
    let _ = writeln!(out, "signed {} tokens", sig.n);
    Ok(())
}

fn cmd_quote(a: QuoteArgs, out: &mut dyn Write) -> Result<i32, Failed> {
    let parent = codec::decode(&read(&a.sig)?)?;
    let tokenizer = tokenizer_by_id(&parent.tokenizer_id)?;
    let text = read_text(&a.input)?;
    let tokens = if parent.is_full() {
        tokenizer.tokenize(&text)?
    } else {
        strip_markers(tokenizer, &text, &a.marker)?
    };

    if let Some(pub_path) = &a.public {
        let public = PublicKey::from_file_bytes(&read(pub_path)?)?;
        let report = verifier::verify(&tokens, &parent, &public);
        if let Some(f) = report.failure {
            let exit = match f {
                Failure::SignatureInvalid => EXIT_INVALID,
                Failure::Malformed(_) => EXIT_MALFORMED,
            };
            return Err(Failed::new(
                exit,
                f.code(),
                format!("input signature: {}", f.message()),
            ));
        }
    }

    let selection = IndexSet::from_ranges(
        a.ranges
            .iter()
            .cloned()
            .chain(a.tokens.iter().map(|&i| i..i + 1)),
    )
    .map_err(|_| {
        Failed::new(
            EXIT_USAGE,
            "empty-selection",
            "select tokens with --range or --tokens",
        )
    })?;

    let sig = if parent.is_full() {
        quoter::quote(&tokens, &selection, &parent)?
    } else {
        quoter::subquote(&tokens, &parent, &selection)?
    };
    // Selection is relative to the input tokens in both cases.
    let quoted = tokens.select(&selection)?;
    let rendered = render_quote(quoted.tokens(), &gaps(sig.n, &sig.indices), &a.marker);
    write(&a.out_text, &[rendered.as_slice(), b"\n"].concat())?;
    write(&a.out_sig, &codec::encode(&sig))?;
    let _ = writeln!(
        out,
        "quoted {} of {} tokens, path {} hashes",
        sig.indices.len(),
        sig.n,
        sig.path.len()
    );
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failed> {
    let sig = codec::decode(&read(&a.sig)?)?;
    let public = PublicKey::from_file_bytes(&read(&a.public)?)?;
    let tokenizer = tokenizer_by_id(&sig.tokenizer_id)?;
    let text = read_text(&a.quote)?;
    let tokens = if sig.is_full() {
        tokenizer.tokenize(&text)
    } else {
        strip_markers(tokenizer, &text, &a.marker)
    }
    .map_err(|e| match e {
        Error::NoTokens => Failed::new(
            EXIT_MALFORMED,
            "token-count-mismatch",
            "quote has no tokens",
        ),
        e => e.into(),
    })?;
    let report = verifier::verify(&tokens, &sig, &public);
    let json = report.to_json();
    let _ = writeln!(out, "{json}");
    if let Some(path) = &a.report {
        write(path, format!("{json}\n").as_bytes())?;
    }
    Ok(match &report.failure {
        None => EXIT_OK,
        Some(f) => {
            let _ = writeln!(err, "invalid[{}]: {}", f.code(), f.message());
            match f {
                Failure::SignatureInvalid => EXIT_INVALID,
                Failure::Malformed(_) => EXIT_MALFORMED,
            }
        }
    })
}

fn cmd_bounds(a: BoundsArgs, out: &mut dyn Write) -> Result<i32, Failed> {
    if a.n == 0 {
        return Err(Failed::new(EXIT_USAGE, "domain", "n must be at least 1"));
    }
    let ts: Vec<usize> = match a.t {
        Some(t) => vec![t],
        None => (1..=a.n).collect(),
    };
    let _ = writeln!(out, "{}", BoundReport::CSV_HEADER);
    let mut violated = false;
    for t in ts {
        let report = if a.exhaustive {
            Some(bounds::oracle_worst_case(a.n, t, a.contiguous)?)
        } else if let Some(samples) = a.sample {
            Some(bounds::oracle_sampled(
                a.n,
                t,
                a.contiguous,
                samples,
                a.seed,
            )?)
        } else {
            None
        };
        match report {
            Some(r) => {
                violated |= r.observed_max > r.bound;
                let _ = writeln!(out, "{}", r.to_csv_row());
            }
            None => {
                let bound = applicable_bound(a.n, t, a.contiguous)?;
                let _ = writeln!(out, "{},{},{},{},,", a.n, t, a.contiguous, bound);
            }
        }
    }
    Ok(if violated { EXIT_INVALID } else { EXIT_OK })
}
