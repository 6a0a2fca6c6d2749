//! Acceptance checks, one line per criterion.
//!
//! Runs with a custom harness: `cargo test --test acceptance`. Every
//! criterion prints `PASS`, `FAIL` or (for the soft performance budget)
//! `INFO`, followed by its measurements. The process fails if any hard
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use qsig::bounds::{
    bound_arbitrary, bound_contiguous, ceil_log2, oracle_worst_case, worst_over_all_quotes,
    PathSizer,
};
use qsig::codec::{decode, encode};
use qsig::hash::{Sha256Hash, Sha512Hash, TreeHash};
use qsig::merkle::{build_tree, TreeShape};
use qsig::quoter::{quote, quote_with, sign, sign_with, subquote};
use qsig::sigscheme::{keygen, KeyPair, ED25519};
use qsig::tokenizer::WHITESPACE_V1;
use qsig::verifier::{verify, verify_with, MAX_TOKENS};
use qsig::{Digest, IndexSet, QuoteSignature, RootSignature, Token, TokenSequence};
use qsig_testkit::{
    all_subsets, attack_message, random_message, reference_required, sample_sentence,
    unmasked_build_tree, CountingHashBackend,
};

enum Outcome {
    Pass(String),
    Fail(String),
    Info(String),
}

type Check = fn() -> Outcome;

fn key(seed: u64) -> KeyPair {
    keygen(ED25519, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap()
}

fn distinct_message(n: usize) -> TokenSequence {
    TokenSequence::from_parts((0..n).map(|i| format!("t{i}"))).unwrap()
}

fn within(budget: Duration, start: Instant, detail: String) -> Outcome {
    let took = start.elapsed();
    if took <= budget {
        Outcome::Pass(format!("{detail} in {took:.2?}"))
    } else {
        Outcome::Fail(format!("{detail} but took {took:.2?}, budget {budget:?}"))
    }
}

// 1. Path reproduction on the eight-word sentence.
fn sample_paths() -> Outcome {
    let start = Instant::now();
    let msg = sample_sentence();
    let kp = key(1);
    let sig = sign(&msg, &kp.secret).unwrap();
    let tree = build_tree(&msg, &Sha256Hash);
    let shape = tree.shape();
    let label = |level, pos| tree.label(shape.find(level, pos).unwrap()).unwrap().clone();

    let q4 = quote(&msg, &IndexSet::from_indices([4]).unwrap(), &sig).unwrap();
    // Inorder: u_{1,0}, u_{3,5}, u_{2,3}.
    let want4 = vec![label(1, 0), label(3, 5), label(2, 3)];
    let q01 = quote(&msg, &IndexSet::from_range(0..2).unwrap(), &sig).unwrap();
    let want01 = vec![label(2, 1), label(1, 1)];

    // Digests computed independently with a plain SHA-256 script.
    let hex4: Vec<String> = q4.path.iter().map(Digest::to_hex).collect();
    let frozen4 = [
        "007f4ecf995bc36f369e9c5baa3470c759646758aca500fb8dfeb2575de9f09c",
        "a2434b46b0a59491305dafd02fe89e7bd7319001135809d91c97bb995788e252",
        "b1d8a7eb5d7bfe73e157d372d3fa372db9335a9f198caec7fdb8a98404de059a",
    ];
    let hex01: Vec<String> = q01.path.iter().map(Digest::to_hex).collect();
    let frozen01 = [
        "00291184f014a2571c7edf2277bbd9038495717312999c3100ca50ccb2d199b7",
        "e5ede39bba11561d20f7598316dbf842f131cfee106eeb4e44bf448213a4c879",
    ];
    if q4.path != want4 || hex4 != frozen4 {
        return Outcome::Fail(format!("quote {{4}} path {hex4:?}"));
    }
    if q01.path != want01 || hex01 != frozen01 {
        return Outcome::Fail(format!("quote {{0,1}} path {hex01:?}"));
    }
    within(
        Duration::from_secs(1),
        start,
        "{4} -> u10,u35,u23 and {0,1} -> u21,u11".into(),
    )
}

// 2. Hash counts for every party, n = 1..=64.
fn hash_counts() -> Outcome {
    let start = Instant::now();
    let kp = key(2);
    let h = CountingHashBackend::new(Sha256Hash);
    for n in 1..=64usize {
        let msg = distinct_message(n);
        let two_n_1 = 2 * n as u64 - 1;
        let full = sign_with(&h, &msg, &kp.secret, WHITESPACE_V1).unwrap();
        let c = h.take();
        if c != two_n_1 {
            return Outcome::Fail(format!("n={n}: sign used {c} hashes"));
        }
        let single = IndexSet::from_indices([0]).unwrap();
        let qs = quote_with(&h, &msg, &single, &full).unwrap();
        let c = h.take();
        if c != two_n_1 {
            return Outcome::Fail(format!("n={n}: quote used {c} hashes"));
        }
        // Token 0 sits at the deepest level, so it needs the most hashes.
        let r = verify_with(&h, &msg.select(&single).unwrap(), &qs, &kp.public);
        let c = h.take();
        let want = u64::from(ceil_log2(n)) + 1;
        if !r.valid || c != want {
            return Outcome::Fail(format!("n={n}: single-token verify used {c}, want {want}"));
        }
        let shape = TreeShape::new(n).unwrap();
        let depths = shape.leaf_depths();
        for (i, &depth) in depths.iter().enumerate().skip(1) {
            let one = IndexSet::from_indices([i]).unwrap();
            let q = quote(&msg, &one, &full).unwrap();
            verify_with(&h, &msg.select(&one).unwrap(), &q, &kp.public);
            let c = h.take();
            if c != u64::from(depth) + 1 || c > want {
                return Outcome::Fail(format!("n={n}, token {i}: verify used {c}"));
            }
        }
        if n >= 2 {
            for dropped in 0..n {
                let most = IndexSet::from_indices((0..n).filter(|&i| i != dropped)).unwrap();
                let q = quote(&msg, &most, &full).unwrap();
                let r = verify_with(&h, &msg.select(&most).unwrap(), &q, &kp.public);
                let c = h.take();
                if !r.valid || c != 2 * n as u64 - 2 {
                    return Outcome::Fail(format!("n={n}, dropping {dropped}: verify used {c}"));
                }
            }
        }
    }
    within(
        Duration::from_secs(10),
        start,
        "sign=quote=2n-1, single=ceil(log n)+1, all-but-one=2n-2 for n=1..64".into(),
    )
}

// 3. Arbitrary-quote bound: tight for powers of two, slack within [0, t]
// otherwise.
fn arbitrary_bound() -> Outcome {
    let start = Instant::now();
    for n in [1usize, 2, 4, 8, 16] {
        // Cross-check the library oracle against the first-principles one.
        let shape = TreeShape::new(n).unwrap();
        let mut worst = vec![0u64; n + 1];
        for s in all_subsets(n) {
            let p = reference_required(&shape, &s).len() as u64;
            worst[s.len()] = worst[s.len()].max(p);
        }
        for (t, &reference) in worst.iter().enumerate().skip(1) {
            let bound = bound_arbitrary(n, t).unwrap();
            let r = oracle_worst_case(n, t, false).unwrap();
            if r.observed_max != bound || reference != bound {
                return Outcome::Fail(format!(
                    "n={n}, t={t}: bound {bound}, oracle {}, reference {reference}",
                    r.observed_max
                ));
            }
        }
    }
    let mut max_slack = 0;
    for n in (3..=14usize).filter(|n| !n.is_power_of_two()) {
        for t in 1..=n {
            let r = oracle_worst_case(n, t, false).unwrap();
            let slack = r.slack();
            if slack < 0 || slack > t as i64 {
                return Outcome::Fail(format!("n={n}, t={t}: slack {slack}"));
            }
            max_slack = max_slack.max(slack);
        }
    }
    within(
        Duration::from_secs(120),
        start,
        format!(
            "exact for n in {{1,2,4,8,16}}, slack <= t for other n <= 14 (max slack {max_slack})"
        ),
    )
}

// 4. Contiguous bound over every window, 3 <= n <= 256.
fn contiguous_bound() -> Outcome {
    let start = Instant::now();
    for n in 3..=256usize {
        let bound = bound_contiguous(n).unwrap();
        let mut worst = 0;
        for t in 1..=n {
            let r = oracle_worst_case(n, t, true).unwrap();
            if r.observed_max > bound {
                return Outcome::Fail(format!(
                    "n={n}, window {} has path {} > {bound}",
                    r.witness.display_ranges(","),
                    r.observed_max
                ));
            }
            worst = worst.max(r.observed_max);
        }
        if n.is_power_of_two() && n >= 8 && worst != bound {
            return Outcome::Fail(format!(
                "n={n}: worst window {worst}, bound {bound} not reached"
            ));
        }
    }
    within(
        Duration::from_secs(60),
        start,
        "path <= 2ceil(log n)-2 for all windows, equality at n=8..256 powers of two".into(),
    )
}

// 5. Worst case over all quotes is ceil(n/2), reached by every second token.
fn half_message() -> Outcome {
    let start = Instant::now();
    for n in [4usize, 8, 16] {
        let (worst, witness) = worst_over_all_quotes(n).unwrap();
        let want = n.div_ceil(2) as u64;
        let alternate = IndexSet::from_indices((0..n).step_by(2)).unwrap();
        let alt = PathSizer::new(n).unwrap().path_len(&alternate).unwrap();
        if worst != want || alt != want {
            return Outcome::Fail(format!(
                "n={n}: worst {worst} (witness {}), alternating {alt}, want {want}",
                witness.display_ranges(",")
            ));
        }
    }
    within(
        Duration::from_secs(120),
        start,
        "max = ceil(n/2) for n in {4,8,16}".into(),
    )
}

fn arb_case() -> impl Strategy<Value = (u64, usize, Vec<usize>)> {
    (any::<u64>(), 1usize..=64).prop_flat_map(|(seed, n)| {
        (
            Just(seed),
            Just(n),
            proptest::collection::btree_set(0..n, 1..=n).prop_map(|s| s.into_iter().collect()),
        )
    })
}

// 6. Honest quotes and sub-quotes always verify.
fn round_trip() -> Outcome {
    let start = Instant::now();
    let kp = key(6);
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let result = runner.run(&arb_case(), |(seed, n, idx)| {
        let msg = random_message(seed, n);
        let sig = sign(&msg, &kp.secret).unwrap();
        let set = IndexSet::from_indices(idx).unwrap();
        let q = quote(&msg, &set, &sig).unwrap();
        let r = verify(&msg.select(&set).unwrap(), &q, &kp.public);
        prop_assert!(r.valid, "{:?}", r.failure);
        Ok(())
    });
    if let Err(e) = result {
        return Outcome::Fail(format!("sign-quote-verify: {e}"));
    }

    let mut pairs = 0u64;
    for n in 1..=10usize {
        let msg = distinct_message(n);
        let sig = sign(&msg, &kp.secret).unwrap();
        for parent in all_subsets(n) {
            let pq = quote(&msg, &parent, &sig).unwrap();
            let ptoks = msg.select(&parent).unwrap();
            for sub in all_subsets(parent.len()) {
                pairs += 1;
                let sq = subquote(&ptoks, &pq, &sub).unwrap();
                let r = verify(&ptoks.select(&sub).unwrap(), &sq, &kp.public);
                if !r.valid || sq.indices != parent.compose(&sub).unwrap() {
                    return Outcome::Fail(format!(
                        "n={n}, parent {}, sub {}: {:?}",
                        parent.display_ranges(","),
                        sub.display_ranges(","),
                        r.failure
                    ));
                }
            }
        }
    }
    within(
        Duration::from_secs(120),
        start,
        format!("10000 random quotes and {pairs} (parent, sub) pairs verify"),
    )
}

fn mutate_byte(bytes: &[u8], at: usize) -> Vec<u8> {
    let mut b = bytes.to_vec();
    b[at] ^= 0x01;
    b
}

// 7. Single-field tampering is always caught.
fn tamper() -> Outcome {
    let start = Instant::now();
    let kp = key(7);
    let mut rejected = 0u64;
    for n in 1..=8usize {
        // Distinct tokens, so every mutation changes what is claimed.
        let msg = distinct_message(n);
        let sig = sign(&msg, &kp.secret).unwrap();
        for set in all_subsets(n) {
            let q = quote(&msg, &set, &sig).unwrap();
            let toks = msg.select(&set).unwrap();
            let mut attempts: Vec<(String, TokenSequence, QuoteSignature)> = Vec::new();

            for (k, tok) in toks.iter().enumerate() {
                for at in 0..tok.as_bytes().len() {
                    let mut v: Vec<Token> = toks.tokens().to_vec();
                    v[k] = Token::new(mutate_byte(tok.as_bytes(), at)).unwrap();
                    attempts.push((
                        format!("token {k} byte {at}"),
                        TokenSequence::new(v).unwrap(),
                        q.clone(),
                    ));
                }
            }
            for (k, d) in q.path.iter().enumerate() {
                for at in 0..d.len() {
                    let mut s = q.clone();
                    s.path[k] = Digest::new(mutate_byte(d.as_bytes(), at));
                    attempts.push((format!("path {k} byte {at}"), toks.clone(), s));
                }
            }
            for old in set.iter() {
                for new in (0..n).filter(|i| !set.contains(*i)) {
                    let mut s = q.clone();
                    s.indices =
                        IndexSet::from_indices(set.iter().map(|i| if i == old { new } else { i }))
                            .unwrap();
                    attempts.push((format!("index {old}->{new}"), toks.clone(), s));
                }
            }
            for other in (0..=16).filter(|&m| m != n) {
                let mut s = q.clone();
                s.n = other;
                attempts.push((format!("n={other}"), toks.clone(), s));
            }
            for at in 0..q.root_sig.bytes.len() {
                let mut s = q.clone();
                s.root_sig = RootSignature {
                    bytes: mutate_byte(&q.root_sig.bytes, at),
                    ..q.root_sig.clone()
                };
                attempts.push((format!("root_sig byte {at}"), toks.clone(), s));
            }

            for (what, t, s) in attempts {
                if verify(&t, &s, &kp.public).valid {
                    return Outcome::Fail(format!(
                        "n={n}, quote {}: {what} accepted",
                        set.display_ranges(",")
                    ));
                }
                rejected += 1;
            }
        }
    }
    within(
        Duration::from_secs(120),
        start,
        format!("{rejected} of {rejected} mutations rejected"),
    )
}

// 8. The unmasked tree falls to the second-preimage message; the real one
// does not.
fn domain_separation() -> Outcome {
    let h = Sha256Hash;
    let orig = sample_sentence();
    let evil = attack_message(&h);
    let u = (
        unmasked_build_tree(&orig, &h)
            .root_digest()
            .unwrap()
            .clone(),
        unmasked_build_tree(&evil, &h)
            .root_digest()
            .unwrap()
            .clone(),
    );
    let m = (
        build_tree(&orig, &h).root_digest().unwrap().clone(),
        build_tree(&evil, &h).root_digest().unwrap().clone(),
    );
    if u.0 != u.1 {
        return Outcome::Fail("unmasked roots differ; attack message is wrong".into());
    }
    if m.0 == m.1 {
        return Outcome::Fail("masked roots collide".into());
    }
    Outcome::Pass(format!(
        "unmasked roots equal ({}…), masked roots differ",
        &u.0.to_hex()[..16]
    ))
}

fn random_envelope(rng: &mut ChaCha20Rng) -> QuoteSignature {
    let n = rng.gen_range(1..=300usize);
    let hash: &dyn TreeHash = if rng.gen_bool(0.5) {
        &Sha256Hash
    } else {
        &Sha512Hash
    };
    let indices = IndexSet::from_indices((0..n).filter(|_| rng.gen_bool(0.4)))
        .unwrap_or_else(|_| IndexSet::from_indices([rng.gen_range(0..n)]).unwrap());
    let path_len = rng.gen_range(0..=n.div_ceil(2));
    let path = (0..path_len)
        .map(|_| Digest::new((0..hash.output_len()).map(|_| rng.gen()).collect()))
        .collect();
    QuoteSignature {
        version: 1,
        hash_id: hash.id().to_string(),
        tokenizer_id: WHITESPACE_V1.to_string(),
        n,
        indices,
        path,
        root_sig: RootSignature {
            scheme_id: ED25519.to_string(),
            bytes: (0..64).map(|_| rng.gen()).collect(),
        },
    }
}

type Mutation = (&'static str, fn(&mut serde_json::Value));

fn set(v: &mut serde_json::Value, field: &str, to: serde_json::Value) {
    v[field] = to;
}

fn at_least_4(v: &mut serde_json::Value) {
    let n = v["n"].as_u64().unwrap().max(4);
    v["n"] = n.into();
}

const MUTATIONS: &[Mutation] = &[
    ("unsupported-version", |v| set(v, "version", 2.into())),
    ("unknown-hash", |v| set(v, "hash_id", "md5".into())),
    ("unknown-scheme", |v| set(v, "scheme_id", "rsa-pss".into())),
    ("unknown-tokenizer", |v| {
        set(v, "tokenizer_id", "sentences".into())
    }),
    ("empty-indices", |v| {
        set(v, "indices", serde_json::json!([]))
    }),
    ("empty-range", |v| {
        set(v, "indices", serde_json::json!([[0, 0]]))
    }),
    ("unsorted-ranges", |v| {
        at_least_4(v);
        set(v, "indices", serde_json::json!([[2, 3], [0, 1]]))
    }),
    ("overlapping-ranges", |v| {
        at_least_4(v);
        set(v, "indices", serde_json::json!([[0, 3], [2, 4]]))
    }),
    ("adjacent-ranges", |v| {
        at_least_4(v);
        set(v, "indices", serde_json::json!([[0, 2], [2, 3]]))
    }),
    ("index-out-of-range", |v| {
        let n = v["n"].as_u64().unwrap();
        set(v, "indices", serde_json::json!([[0, n + 1]]))
    }),
    ("zero-length", |v| set(v, "n", 0.into())),
    ("too-many-tokens", |v| {
        set(v, "n", (MAX_TOKENS as u64 + 1).into())
    }),
    ("digest-length", |v| {
        set(v, "path", serde_json::json!(["AAAAAAAAAAAAAAAAAAAAAA"]))
    }),
    ("bad-base64", |v| {
        set(v, "path", serde_json::json!(["*not base64*"]))
    }),
    ("bad-base64", |v| set(v, "root_sig", "a+b/".into())),
    ("path-too-long", |v| {
        let n = v["n"].as_u64().unwrap() as usize;
        let d = v["path"]
            .get(0)
            .cloned()
            .unwrap_or_else(|| "A".repeat(43).into());
        set(
            v,
            "path",
            serde_json::Value::Array(vec![d; n.div_ceil(2) + 1]),
        )
    }),
    ("syntax", |v| {
        v.as_object_mut()
            .unwrap()
            .insert("comment".into(), "hi".into());
    }),
    ("syntax", |v| {
        v.as_object_mut().unwrap().remove("path");
    }),
    ("syntax", |v| set(v, "n", "eight".into())),
];

// 9. Codec round trip and rejection of every malformed class.
fn codec() -> Outcome {
    let start = Instant::now();
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let result = runner.run(&any::<u64>(), |seed| {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let sig = random_envelope(&mut rng);
        let bytes = encode(&sig);
        let back = decode(&bytes).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&back, &sig);
        prop_assert_eq!(encode(&back), bytes.clone());

        let value: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        for (code, mutate) in MUTATIONS {
            let mut v = value.clone();
            mutate(&mut v);
            let err = decode(&serde_json::to_vec(&v).unwrap());
            prop_assert_eq!(
                err.as_ref().map_err(|e| e.code()).err(),
                Some(*code),
                "{:?}",
                err
            );
        }
        let truncated = &bytes[..bytes.len() - 3];
        prop_assert_eq!(
            decode(truncated).map_err(|e| e.code()).err(),
            Some("syntax")
        );
        let dup = String::from_utf8(bytes.clone())
            .unwrap()
            .replacen('{', "{\"n\":1,", 1);
        prop_assert_eq!(
            decode(dup.as_bytes()).map_err(|e| e.code()).err(),
            Some("syntax")
        );
        Ok(())
    });
    match result {
        Ok(()) => within(
            Duration::from_secs(120),
            start,
            format!(
                "10000 envelopes round-trip, {} mutation classes rejected",
                MUTATIONS.len() + 2
            ),
        ),
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

// 10. Soft performance budget; reported, never fails.
fn performance() -> Outcome {
    let kp = key(10);
    let msg = random_message(10, 10_000);
    let sig = sign(&msg, &kp.secret).unwrap();
    let mut sign_best = Duration::MAX;
    for _ in 0..3 {
        let t = Instant::now();
        std::hint::black_box(sign(&msg, &kp.secret).unwrap());
        sign_best = sign_best.min(t.elapsed());
    }
    let window = IndexSet::from_range(4_950..5_050).unwrap();
    let q = quote(&msg, &window, &sig).unwrap();
    let toks = msg.select(&window).unwrap();
    let mut verify_best = Duration::MAX;
    for _ in 0..10 {
        let t = Instant::now();
        let r = std::hint::black_box(verify(&toks, &q, &kp.public));
        verify_best = verify_best.min(t.elapsed());
        assert!(r.valid);
    }
    let ok = sign_best < Duration::from_millis(250) && verify_best < Duration::from_millis(10);
    Outcome::Info(format!(
        "sign 10000 tokens {sign_best:.2?} (budget 250ms), verify 100-token window {verify_best:.2?} (budget 10ms): {}",
        if ok { "within budget" } else { "OVER BUDGET" }
    ))
}

fn main() {
    let checks: &[(&str, Check)] = &[
        ("1 quote paths on the eight-word sentence", sample_paths),
        ("2 hash counts", hash_counts),
        ("3 arbitrary-quote bound", arbitrary_bound),
        ("4 contiguous-quote bound", contiguous_bound),
        ("5 worst case over all quotes", half_message),
        ("6 round-trip completeness", round_trip),
        ("7 tamper soundness", tamper),
        ("8 domain separation", domain_separation),
        ("9 envelope codec", codec),
        ("10 performance budget", performance),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Outcome::Fail(format!("panicked: {}", panic_text(&p))));
        match outcome {
            Outcome::Pass(d) => println!("PASS criterion {name}: {d}"),
            Outcome::Info(d) => println!("INFO criterion {name}: {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("FAIL criterion {name}: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn panic_text(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into())
}
