//! Canonical document formats and the newline-delimited wire protocol.
//!
//! Every document is a single-line JSON object with fields in a fixed order;
//! the canonical bytes produced here are what fingerprints hash, what the
//! provider persists, and what byte-exact roundtrip tests compare. Integers
//! encode as lowercase hexadecimal with no leading zeros ("0" for zero).
//!
//! Canonical field orders:
//!
//! * public key:  `v, scheme, [add_bound], public{...}`
//! * key file:    `v, scheme, [add_bound], public{...}, private{...}`
//! * ciphertext:  `v, scheme, c1, [c2], fingerprint`
//! * request:     `v, type, token, <type-specific fields>`
//! * response:    `v, type, <payload fields>`
//!
//! Per-scheme field orders: RSA public `n, b`, private `p, q, a, phi`;
//! PAILLIER public `n, g`, private `lambda, mu`; ELGAMAL public
//! `p, alpha, beta`, private `a`; GM public `n, g`, private `p, q`.
//!
//! Parsers are strict: any unknown field is a schema violation, which is the
//! mechanism that hard-rejects private material (a smuggled "lambda" never
//! matches a public schema). Private key components are unrepresentable in
//! request and response frames by construction.

use num_bigint::BigUint;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CryptoError;
use crate::evaluator::HomomorphicOp;
use crate::schemes::{
    Ciphertext, ElGamalKeypair, ElGamalPublicKey, ElGamalVariant, GmKeypair, GmPublicKey,
    KeyFingerprint, Keypair, PaillierKeypair, PaillierPublicKey, PublicKey, RsaKeypair,
    RsaPublicKey, SchemeId,
};

/// Wire protocol version stamped on every document and frame.
pub const WIRE_VERSION: u64 = 1;

// ---------------------------------------------------------------------------
// hex integers

pub fn nat_to_hex(n: &BigUint) -> String {
    format!("{n:x}")
}

pub fn parse_hex_nat(s: &str) -> Result<BigUint, String> {
    if s.is_empty() {
        return Err("empty hex integer".into());
    }
    if s.bytes().any(|b| !b.is_ascii_hexdigit() || b.is_ascii_uppercase()) {
        return Err(format!("non-canonical hex integer {s:?}"));
    }
    if s.len() > 1 && s.starts_with('0') {
        return Err(format!("hex integer {s:?} has leading zeros"));
    }
    BigUint::parse_bytes(s.as_bytes(), 16).ok_or_else(|| format!("unparseable hex integer {s:?}"))
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

// ---------------------------------------------------------------------------
// canonical writers

/// Canonical single-line serialization of a public key; the fingerprint
/// input and the exact payload of REGISTER_KEY frames and `.pub` files.
pub fn canonical_public_key(pk: &PublicKey) -> String {
    match pk {
        PublicKey::Rsa(k) => format!(
            "{{\"v\":1,\"scheme\":\"RSA\",\"public\":{{\"n\":\"{}\",\"b\":\"{}\"}}}}",
            nat_to_hex(&k.n),
            nat_to_hex(&k.b)
        ),
        PublicKey::Paillier(k) => format!(
            "{{\"v\":1,\"scheme\":\"PAILLIER\",\"public\":{{\"n\":\"{}\",\"g\":\"{}\"}}}}",
            nat_to_hex(&k.n),
            nat_to_hex(&k.g)
        ),
        PublicKey::ElGamal(k) => {
            let fields = format!(
                "\"public\":{{\"p\":\"{}\",\"alpha\":\"{}\",\"beta\":\"{}\"}}",
                nat_to_hex(&k.p),
                nat_to_hex(&k.alpha),
                nat_to_hex(&k.beta)
            );
            match k.variant {
                ElGamalVariant::Mul => {
                    format!("{{\"v\":1,\"scheme\":\"ELGAMAL_MUL\",{fields}}}")
                }
                ElGamalVariant::Add => format!(
                    "{{\"v\":1,\"scheme\":\"ELGAMAL_ADD\",\"add_bound\":{},{fields}}}",
                    k.add_bound.expect("ADD variant always carries add_bound")
                ),
            }
        }
        PublicKey::Gm(k) => format!(
            "{{\"v\":1,\"scheme\":\"GM\",\"public\":{{\"n\":\"{}\",\"g\":\"{}\"}}}}",
            nat_to_hex(&k.n),
            nat_to_hex(&k.g)
        ),
    }
}

/// 16-byte truncated SHA-256 over the canonical public key bytes.
pub fn key_fingerprint(pk: &PublicKey) -> KeyFingerprint {
    let digest = Sha256::digest(canonical_public_key(pk).as_bytes());
    let mut out = [0u8; 16];
    out.copy_from_slice(&digest[..16]);
    KeyFingerprint(out)
}

/// Canonical private key file contents: the public document plus the
/// scheme's private fields. Never sent over the wire.
pub fn canonical_keyfile(kp: &Keypair) -> String {
    let public = canonical_public_key(&kp.public());
    let head = public.strip_suffix('}').expect("object ends with brace");
    let private = match kp {
        Keypair::Rsa(k) => format!(
            "{{\"p\":\"{}\",\"q\":\"{}\",\"a\":\"{}\",\"phi\":\"{}\"}}",
            nat_to_hex(&k.p),
            nat_to_hex(&k.q),
            nat_to_hex(&k.a),
            nat_to_hex(&k.phi)
        ),
        Keypair::Paillier(k) => format!(
            "{{\"lambda\":\"{}\",\"mu\":\"{}\"}}",
            nat_to_hex(&k.lambda),
            nat_to_hex(&k.mu)
        ),
        Keypair::ElGamal(k) => format!("{{\"a\":\"{}\"}}", nat_to_hex(&k.a)),
        Keypair::Gm(k) => {
            format!("{{\"p\":\"{}\",\"q\":\"{}\"}}", nat_to_hex(&k.p), nat_to_hex(&k.q))
        }
    };
    format!("{head},\"private\":{private}}}")
}

/// Canonical single-line serialization of a ciphertext document.
pub fn canonical_ciphertext(ct: &Ciphertext) -> String {
    match &ct.c2 {
        Some(c2) => format!(
            "{{\"v\":1,\"scheme\":\"{}\",\"c1\":\"{}\",\"c2\":\"{}\",\"fingerprint\":\"{}\"}}",
            ct.scheme,
            nat_to_hex(&ct.c1),
            nat_to_hex(c2),
            ct.fingerprint.to_hex()
        ),
        None => format!(
            "{{\"v\":1,\"scheme\":\"{}\",\"c1\":\"{}\",\"fingerprint\":\"{}\"}}",
            ct.scheme,
            nat_to_hex(&ct.c1),
            ct.fingerprint.to_hex()
        ),
    }
}

// ---------------------------------------------------------------------------
// strict Value helpers

fn expect_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, String> {
    v.as_object().ok_or_else(|| format!("{what} must be a JSON object"))
}

/// Exact-key check: every listed required key present, nothing else allowed.
fn check_keys(
    obj: &Map<String, Value>,
    required: &[&str],
    optional: &[&str],
    what: &str,
) -> Result<(), String> {
    for key in required {
        if !obj.contains_key(*key) {
            return Err(format!("{what} is missing field {key:?}"));
        }
    }
    for key in obj.keys() {
        if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
            return Err(format!("{what} contains unexpected field {key:?}"));
        }
    }
    Ok(())
}

fn get_str<'a>(obj: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a str, String> {
    obj.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| format!("{what} field {key:?} must be a string"))
}

fn get_u64(obj: &Map<String, Value>, key: &str, what: &str) -> Result<u64, String> {
    obj.get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| format!("{what} field {key:?} must be an unsigned integer"))
}

fn get_hex(obj: &Map<String, Value>, key: &str, what: &str) -> Result<BigUint, String> {
    parse_hex_nat(get_str(obj, key, what)?).map_err(|e| format!("{what} field {key:?}: {e}"))
}

fn check_version(obj: &Map<String, Value>, what: &str) -> Result<(), String> {
    let v = get_u64(obj, "v", what)?;
    if v != WIRE_VERSION {
        return Err(format!("{what} has unsupported version {v}"));
    }
    Ok(())
}

fn get_scheme(obj: &Map<String, Value>, what: &str) -> Result<SchemeId, String> {
    get_str(obj, "scheme", what)?.parse::<SchemeId>().map_err(|e| e.to_string())
}

fn min_modulus(n: &BigUint, what: &str, key: &str) -> Result<(), String> {
    if n < &BigUint::from(2u32) {
        return Err(format!("{what} field {key:?} must be >= 2"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// document parsers

fn parse_public_fields(
    scheme: SchemeId,
    obj: &Map<String, Value>,
    add_bound: Option<u64>,
) -> Result<PublicKey, String> {
    let what = "public key";
    match scheme {
        SchemeId::Rsa => {
            check_keys(obj, &["n", "b"], &[], what)?;
            let n = get_hex(obj, "n", what)?;
            min_modulus(&n, what, "n")?;
            Ok(PublicKey::Rsa(RsaPublicKey { n, b: get_hex(obj, "b", what)? }))
        }
        SchemeId::Paillier => {
            check_keys(obj, &["n", "g"], &[], what)?;
            let n = get_hex(obj, "n", what)?;
            min_modulus(&n, what, "n")?;
            Ok(PublicKey::Paillier(PaillierPublicKey { n, g: get_hex(obj, "g", what)? }))
        }
        SchemeId::ElGamalMul | SchemeId::ElGamalAdd => {
            check_keys(obj, &["p", "alpha", "beta"], &[], what)?;
            let p = get_hex(obj, "p", what)?;
            min_modulus(&p, what, "p")?;
            let variant = if scheme == SchemeId::ElGamalAdd {
                ElGamalVariant::Add
            } else {
                ElGamalVariant::Mul
            };
            Ok(PublicKey::ElGamal(ElGamalPublicKey {
                p,
                alpha: get_hex(obj, "alpha", what)?,
                beta: get_hex(obj, "beta", what)?,
                variant,
                add_bound,
            }))
        }
        SchemeId::Gm => {
            check_keys(obj, &["n", "g"], &[], what)?;
            let n = get_hex(obj, "n", what)?;
            min_modulus(&n, what, "n")?;
            Ok(PublicKey::Gm(GmPublicKey { n, g: get_hex(obj, "g", what)? }))
        }
    }
}

fn public_key_from_value(v: &Value) -> Result<PublicKey, String> {
    let what = "public key document";
    let obj = expect_object(v, what)?;
    let scheme = get_scheme(obj, what)?;
    let add_bound = if scheme == SchemeId::ElGamalAdd {
        check_keys(obj, &["v", "scheme", "add_bound", "public"], &[], what)?;
        let bound = get_u64(obj, "add_bound", what)?;
        if bound == 0 {
            return Err(format!("{what} field \"add_bound\" must be >= 1"));
        }
        Some(bound)
    } else {
        check_keys(obj, &["v", "scheme", "public"], &[], what)?;
        None
    };
    check_version(obj, what)?;
    let public = expect_object(
        obj.get("public").expect("checked present"),
        "public key \"public\" section",
    )?;
    parse_public_fields(scheme, public, add_bound)
}

/// Strict parse of a public key document; any unknown field (private names
/// included) is a schema violation.
pub fn parse_public_key(json: &str) -> Result<PublicKey, CryptoError> {
    let value: Value = serde_json::from_str(json)
        .map_err(|e| CryptoError::SchemaViolation(format!("invalid JSON: {e}")))?;
    public_key_from_value(&value).map_err(CryptoError::SchemaViolation)
}

fn keypair_from_value(v: &Value) -> Result<Keypair, String> {
    let what = "key file document";
    let obj = expect_object(v, what)?;
    let scheme = get_scheme(obj, what)?;
    let mut top_required = vec!["v", "scheme", "public", "private"];
    if scheme == SchemeId::ElGamalAdd {
        top_required.insert(2, "add_bound");
    }
    check_keys(obj, &top_required, &[], what)?;
    check_version(obj, what)?;
    let add_bound = if scheme == SchemeId::ElGamalAdd {
        Some(get_u64(obj, "add_bound", what)?)
    } else {
        None
    };
    let public_obj =
        expect_object(obj.get("public").expect("checked present"), "key file public section")?;
    let public = parse_public_fields(scheme, public_obj, add_bound)?;
    let private =
        expect_object(obj.get("private").expect("checked present"), "key file private section")?;
    let what = "key file private section";
    Ok(match public {
        PublicKey::Rsa(pk) => {
            check_keys(private, &["p", "q", "a", "phi"], &[], what)?;
            Keypair::Rsa(RsaKeypair {
                public: pk,
                p: get_hex(private, "p", what)?,
                q: get_hex(private, "q", what)?,
                a: get_hex(private, "a", what)?,
                phi: get_hex(private, "phi", what)?,
            })
        }
        PublicKey::Paillier(pk) => {
            check_keys(private, &["lambda", "mu"], &[], what)?;
            Keypair::Paillier(PaillierKeypair {
                public: pk,
                lambda: get_hex(private, "lambda", what)?,
                mu: get_hex(private, "mu", what)?,
            })
        }
        PublicKey::ElGamal(pk) => {
            check_keys(private, &["a"], &[], what)?;
            Keypair::ElGamal(ElGamalKeypair { public: pk, a: get_hex(private, "a", what)? })
        }
        PublicKey::Gm(pk) => {
            check_keys(private, &["p", "q"], &[], what)?;
            Keypair::Gm(GmKeypair {
                public: pk,
                p: get_hex(private, "p", what)?,
                q: get_hex(private, "q", what)?,
            })
        }
    })
}

/// Strict parse of a private key file. Structural only; callers re-validate
/// the keypair invariants via [`Keypair::validate`].
pub fn parse_keyfile(json: &str) -> Result<Keypair, CryptoError> {
    let value: Value = serde_json::from_str(json)
        .map_err(|e| CryptoError::SchemaViolation(format!("invalid JSON: {e}")))?;
    keypair_from_value(&value).map_err(CryptoError::SchemaViolation)
}

fn ciphertext_from_value(v: &Value) -> Result<Ciphertext, String> {
    let what = "ciphertext document";
    let obj = expect_object(v, what)?;
    let scheme = get_scheme(obj, what)?;
    let elgamal = matches!(scheme, SchemeId::ElGamalMul | SchemeId::ElGamalAdd);
    if elgamal {
        check_keys(obj, &["v", "scheme", "c1", "c2", "fingerprint"], &[], what)?;
    } else {
        check_keys(obj, &["v", "scheme", "c1", "fingerprint"], &[], what)?;
    }
    check_version(obj, what)?;
    let c2 = if elgamal { Some(get_hex(obj, "c2", what)?) } else { None };
    Ok(Ciphertext {
        scheme,
        c1: get_hex(obj, "c1", what)?,
        c2,
        fingerprint: KeyFingerprint::from_hex(get_str(obj, "fingerprint", what)?)
            .map_err(|e| e.to_string())?,
    })
}

/// Strict parse of a ciphertext document.
pub fn parse_ciphertext(json: &str) -> Result<Ciphertext, CryptoError> {
    let value: Value = serde_json::from_str(json)
        .map_err(|e| CryptoError::MalformedCiphertext(format!("invalid JSON: {e}")))?;
    ciphertext_from_value(&value).map_err(CryptoError::MalformedCiphertext)
}

// ---------------------------------------------------------------------------
// protocol frames

/// Client-to-provider request, one per line.
#[derive(Debug, Clone, PartialEq)]
pub enum Request {
    RegisterKey { token: String, key: PublicKey },
    Put { token: String, blob_id: String, ciphertext: Ciphertext },
    Get { token: String, blob_id: String },
    List { token: String },
    Compute { token: String, op: HomomorphicOp, input_ids: Vec<String>, output_id: String },
}

impl Request {
    pub fn token(&self) -> &str {
        match self {
            Request::RegisterKey { token, .. }
            | Request::Put { token, .. }
            | Request::Get { token, .. }
            | Request::List { token }
            | Request::Compute { token, .. } => token,
        }
    }
}

/// Summary row in a LIST response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlobSummary {
    pub blob_id: String,
    pub scheme: SchemeId,
    pub created_at: String,
}

/// Payload of an OK frame; which fields are present depends on the request.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OkPayload {
    pub fingerprint: Option<KeyFingerprint>,
    /// Canonical ciphertext document, byte-exact as stored by the provider.
    pub ciphertext_json: Option<String>,
    pub blobs: Option<Vec<BlobSummary>>,
    pub output_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    Ok(OkPayload),
    Error { code: String, detail: String },
}

pub fn write_request(req: &Request) -> String {
    match req {
        Request::RegisterKey { token, key } => format!(
            "{{\"v\":1,\"type\":\"REGISTER_KEY\",\"token\":{},\"key\":{}}}",
            json_str(token),
            canonical_public_key(key)
        ),
        Request::Put { token, blob_id, ciphertext } => format!(
            "{{\"v\":1,\"type\":\"PUT\",\"token\":{},\"blob_id\":{},\"ciphertext\":{}}}",
            json_str(token),
            json_str(blob_id),
            canonical_ciphertext(ciphertext)
        ),
        Request::Get { token, blob_id } => format!(
            "{{\"v\":1,\"type\":\"GET\",\"token\":{},\"blob_id\":{}}}",
            json_str(token),
            json_str(blob_id)
        ),
        Request::List { token } => {
            format!("{{\"v\":1,\"type\":\"LIST\",\"token\":{}}}", json_str(token))
        }
        Request::Compute { token, op, input_ids, output_id } => {
            let ids: Vec<String> = input_ids.iter().map(|s| json_str(s)).collect();
            format!(
                "{{\"v\":1,\"type\":\"COMPUTE\",\"token\":{},\"op\":\"{}\",\"input_ids\":[{}],\"output_id\":{}}}",
                json_str(token),
                op,
                ids.join(","),
                json_str(output_id)
            )
        }
    }
}

pub fn parse_request(line: &str) -> Result<Request, CryptoError> {
    let violation = CryptoError::SchemaViolation;
    let value: Value = serde_json::from_str(line)
        .map_err(|e| violation(format!("invalid JSON: {e}")))?;
    let what = "request";
    let obj = expect_object(&value, what).map_err(violation)?;
    let ty = get_str(obj, "type", what).map_err(violation)?.to_owned();
    let base = ["v", "type", "token"];
    let parsed = match ty.as_str() {
        "REGISTER_KEY" => {
            check_keys(obj, &[&base[..], &["key"]].concat(), &[], what).map_err(violation)?;
            let key = public_key_from_value(obj.get("key").expect("checked present"))
                .map_err(violation)?;
            Request::RegisterKey { token: String::new(), key }
        }
        "PUT" => {
            check_keys(obj, &[&base[..], &["blob_id", "ciphertext"]].concat(), &[], what)
                .map_err(violation)?;
            let ciphertext = ciphertext_from_value(obj.get("ciphertext").expect("checked present"))
                .map_err(CryptoError::MalformedCiphertext)?;
            Request::Put {
                token: String::new(),
                blob_id: get_str(obj, "blob_id", what).map_err(violation)?.to_owned(),
                ciphertext,
            }
        }
        "GET" => {
            check_keys(obj, &[&base[..], &["blob_id"]].concat(), &[], what).map_err(violation)?;
            Request::Get {
                token: String::new(),
                blob_id: get_str(obj, "blob_id", what).map_err(violation)?.to_owned(),
            }
        }
        "LIST" => {
            check_keys(obj, &base, &[], what).map_err(violation)?;
            Request::List { token: String::new() }
        }
        "COMPUTE" => {
            check_keys(
                obj,
                &[&base[..], &["op", "input_ids", "output_id"]].concat(),
                &[],
                what,
            )
            .map_err(violation)?;
            let op: HomomorphicOp =
                get_str(obj, "op", what).map_err(violation)?.parse().map_err(
                    |e: CryptoError| violation(e.to_string()),
                )?;
            let ids = obj
                .get("input_ids")
                .and_then(Value::as_array)
                .ok_or_else(|| violation("request field \"input_ids\" must be an array".into()))?;
            let input_ids = ids
                .iter()
                .map(|v| {
                    v.as_str().map(str::to_owned).ok_or_else(|| {
                        violation("request field \"input_ids\" must contain strings".into())
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Request::Compute {
                token: String::new(),
                op,
                input_ids,
                output_id: get_str(obj, "output_id", what).map_err(violation)?.to_owned(),
            }
        }
        other => return Err(violation(format!("unknown request type {other:?}"))),
    };
    check_version(obj, what).map_err(violation)?;
    let token = get_str(obj, "token", what).map_err(violation)?.to_owned();
    if token.is_empty() {
        return Err(violation("request token must be non-empty".into()));
    }
    Ok(match parsed {
        Request::RegisterKey { key, .. } => Request::RegisterKey { token, key },
        Request::Put { blob_id, ciphertext, .. } => Request::Put { token, blob_id, ciphertext },
        Request::Get { blob_id, .. } => Request::Get { token, blob_id },
        Request::List { .. } => Request::List { token },
        Request::Compute { op, input_ids, output_id, .. } => {
            Request::Compute { token, op, input_ids, output_id }
        }
    })
}

pub fn write_response(resp: &Response) -> String {
    match resp {
        Response::Ok(payload) => {
            let mut out = String::from("{\"v\":1,\"type\":\"OK\"");
            if let Some(fp) = &payload.fingerprint {
                out.push_str(&format!(",\"fingerprint\":\"{}\"", fp.to_hex()));
            }
            if let Some(ct) = &payload.ciphertext_json {
                out.push_str(&format!(",\"ciphertext\":{ct}"));
            }
            if let Some(blobs) = &payload.blobs {
                let rows: Vec<String> = blobs
                    .iter()
                    .map(|b| {
                        format!(
                            "{{\"blob_id\":{},\"scheme\":\"{}\",\"created_at\":{}}}",
                            json_str(&b.blob_id),
                            b.scheme,
                            json_str(&b.created_at)
                        )
                    })
                    .collect();
                out.push_str(&format!(",\"blobs\":[{}]", rows.join(",")));
            }
            if let Some(id) = &payload.output_id {
                out.push_str(&format!(",\"output_id\":{}", json_str(id)));
            }
            out.push('}');
            out
        }
        Response::Error { code, detail } => format!(
            "{{\"v\":1,\"type\":\"ERROR\",\"code\":{},\"detail\":{}}}",
            json_str(code),
            json_str(detail)
        ),
    }
}

pub fn parse_response(line: &str) -> Result<Response, CryptoError> {
    let violation = CryptoError::SchemaViolation;
    let value: Value = serde_json::from_str(line)
        .map_err(|e| violation(format!("invalid JSON: {e}")))?;
    let what = "response";
    let obj = expect_object(&value, what).map_err(violation)?;
    check_version(obj, what).map_err(violation)?;
    match get_str(obj, "type", what).map_err(violation)? {
        "OK" => {
            check_keys(
                obj,
                &["v", "type"],
                &["fingerprint", "ciphertext", "blobs", "output_id"],
                what,
            )
            .map_err(violation)?;
            let fingerprint = obj
                .get("fingerprint")
                .map(|v| {
                    v.as_str()
                        .ok_or_else(|| violation("fingerprint must be a string".into()))
                        .and_then(|s| KeyFingerprint::from_hex(s))
                })
                .transpose()?;
            let ciphertext_json = obj
                .get("ciphertext")
                .map(|v| {
                    ciphertext_from_value(v).map_err(CryptoError::MalformedCiphertext)?;
                    Ok::<String, CryptoError>(
                        serde_json::to_string(v).expect("value serializes"),
                    )
                })
                .transpose()?;
            let blobs = obj
                .get("blobs")
                .map(|v| {
                    let rows = v
                        .as_array()
                        .ok_or_else(|| violation("blobs must be an array".into()))?;
                    rows.iter()
                        .map(|row| {
                            let what = "blob summary";
                            let obj = expect_object(row, what).map_err(violation)?;
                            check_keys(obj, &["blob_id", "scheme", "created_at"], &[], what)
                                .map_err(violation)?;
                            Ok(BlobSummary {
                                blob_id: get_str(obj, "blob_id", what)
                                    .map_err(violation)?
                                    .to_owned(),
                                scheme: get_scheme(obj, what).map_err(violation)?,
                                created_at: get_str(obj, "created_at", what)
                                    .map_err(violation)?
                                    .to_owned(),
                            })
                        })
                        .collect::<Result<Vec<_>, CryptoError>>()
                })
                .transpose()?;
            let output_id = obj
                .get("output_id")
                .map(|v| {
                    v.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| violation("output_id must be a string".into()))
                })
                .transpose()?;
            Ok(Response::Ok(OkPayload { fingerprint, ciphertext_json, blobs, output_id }))
        }
        "ERROR" => {
            check_keys(obj, &["v", "type", "code", "detail"], &[], what).map_err(violation)?;
            Ok(Response::Error {
                code: get_str(obj, "code", what).map_err(violation)?.to_owned(),
                detail: get_str(obj, "detail", what).map_err(violation)?.to_owned(),
            })
        }
        other => Err(violation(format!("unknown response type {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{ElGamalKeypair, GmKeypair, PaillierKeypair, RsaKeypair};
    use num_traits::Zero;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn toy_rsa() -> Keypair {
        Keypair::Rsa(RsaKeypair::from_primes(big(61), big(53), big(17), false).unwrap())
    }

    fn toy_paillier() -> Keypair {
        Keypair::Paillier(PaillierKeypair::from_primes(&big(3), &big(5)).unwrap())
    }

    fn toy_elgamal_add() -> Keypair {
        Keypair::ElGamal(
            ElGamalKeypair::from_parts(big(23), big(5), big(6), ElGamalVariant::Add, Some(20))
                .unwrap(),
        )
    }

    fn toy_gm() -> Keypair {
        Keypair::Gm(GmKeypair::from_primes(big(7), big(11)).unwrap())
    }

    #[test]
    fn hex_encoding_is_canonical() {
        assert_eq!(nat_to_hex(&BigUint::zero()), "0");
        assert_eq!(nat_to_hex(&big(255)), "ff");
        assert_eq!(nat_to_hex(&big(3233)), "ca1");
        assert_eq!(parse_hex_nat("ca1").unwrap(), big(3233));
        assert_eq!(parse_hex_nat("0").unwrap(), BigUint::zero());
        assert!(parse_hex_nat("").is_err());
        assert!(parse_hex_nat("0ff").is_err());
        assert!(parse_hex_nat("FF").is_err());
        assert!(parse_hex_nat("xyz").is_err());
    }

    #[test]
    fn canonical_public_key_golden_bytes() {
        assert_eq!(
            canonical_public_key(&toy_rsa().public()),
            r#"{"v":1,"scheme":"RSA","public":{"n":"ca1","b":"11"}}"#
        );
        assert_eq!(
            canonical_public_key(&toy_paillier().public()),
            r#"{"v":1,"scheme":"PAILLIER","public":{"n":"f","g":"10"}}"#
        );
        assert_eq!(
            canonical_public_key(&toy_elgamal_add().public()),
            r#"{"v":1,"scheme":"ELGAMAL_ADD","add_bound":20,"public":{"p":"17","alpha":"5","beta":"8"}}"#
        );
        assert_eq!(
            canonical_public_key(&toy_gm().public()),
            r#"{"v":1,"scheme":"GM","public":{"n":"4d","g":"6"}}"#
        );
    }

    #[test]
    fn fingerprint_is_stable_and_key_dependent() {
        let fp1 = key_fingerprint(&toy_rsa().public());
        let fp2 = key_fingerprint(&toy_rsa().public());
        assert_eq!(fp1, fp2);
        assert_eq!(fp1.to_hex().len(), 32);
        let other = Keypair::Rsa(RsaKeypair::from_primes(big(61), big(53), big(19), false).unwrap());
        assert_ne!(fp1, key_fingerprint(&other.public()));
        assert_eq!(KeyFingerprint::from_hex(&fp1.to_hex()).unwrap(), fp1);
    }

    #[test]
    fn public_key_documents_roundtrip() {
        for kp in [toy_rsa(), toy_paillier(), toy_elgamal_add(), toy_gm()] {
            let doc = canonical_public_key(&kp.public());
            let parsed = parse_public_key(&doc).unwrap();
            assert_eq!(parsed, kp.public());
            assert_eq!(canonical_public_key(&parsed), doc);
        }
    }

    #[test]
    fn keyfile_documents_roundtrip() {
        for kp in [toy_rsa(), toy_paillier(), toy_elgamal_add(), toy_gm()] {
            let doc = canonical_keyfile(&kp);
            let parsed = parse_keyfile(&doc).unwrap();
            assert_eq!(parsed, kp);
            parsed.validate().unwrap();
            assert_eq!(canonical_keyfile(&parsed), doc);
        }
    }

    #[test]
    fn keyfile_contains_private_fields_but_public_doc_does_not() {
        let kp = toy_paillier();
        let keyfile = canonical_keyfile(&kp);
        assert!(keyfile.contains("\"lambda\""));
        assert!(keyfile.contains("\"mu\""));
        let public = canonical_public_key(&kp.public());
        assert!(!public.contains("lambda"));
        assert!(!public.contains("private"));
    }

    #[test]
    fn smuggled_private_fields_are_schema_violations() {
        let err = parse_public_key(
            r#"{"v":1,"scheme":"PAILLIER","public":{"n":"f","g":"10"},"lambda":"4"}"#,
        )
        .unwrap_err();
        assert!(matches!(err, CryptoError::SchemaViolation(_)), "{err}");
        assert!(err.to_string().contains("lambda"));

        let err = parse_public_key(
            r#"{"v":1,"scheme":"PAILLIER","public":{"n":"f","g":"10","lambda":"4"}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("lambda"));

        // A private key file never parses as a public key document.
        let err = parse_public_key(&canonical_keyfile(&toy_paillier())).unwrap_err();
        assert!(matches!(err, CryptoError::SchemaViolation(_)));
    }

    #[test]
    fn public_key_document_rejections() {
        // wrong version
        assert!(parse_public_key(r#"{"v":2,"scheme":"GM","public":{"n":"4d","g":"6"}}"#).is_err());
        // missing section
        assert!(parse_public_key(r#"{"v":1,"scheme":"GM"}"#).is_err());
        // non-canonical hex
        assert!(
            parse_public_key(r#"{"v":1,"scheme":"GM","public":{"n":"4D","g":"6"}}"#).is_err()
        );
        assert!(
            parse_public_key(r#"{"v":1,"scheme":"GM","public":{"n":"04d","g":"6"}}"#).is_err()
        );
        // add_bound required for ELGAMAL_ADD
        assert!(parse_public_key(
            r#"{"v":1,"scheme":"ELGAMAL_ADD","public":{"p":"17","alpha":"5","beta":"8"}}"#
        )
        .is_err());
        // ... and rejected elsewhere
        assert!(parse_public_key(
            r#"{"v":1,"scheme":"GM","add_bound":9,"public":{"n":"4d","g":"6"}}"#
        )
        .is_err());
        // degenerate modulus
        assert!(parse_public_key(r#"{"v":1,"scheme":"GM","public":{"n":"1","g":"6"}}"#).is_err());
    }

    #[test]
    fn ciphertext_documents_roundtrip() {
        let rsa = toy_rsa();
        let ct = match &rsa {
            Keypair::Rsa(kp) => kp.public.encrypt(&big(65)).unwrap(),
            _ => unreachable!(),
        };
        let doc = canonical_ciphertext(&ct);
        assert_eq!(
            doc,
            format!(
                r#"{{"v":1,"scheme":"RSA","c1":"ae6","fingerprint":"{}"}}"#,
                ct.fingerprint.to_hex()
            )
        );
        let parsed = parse_ciphertext(&doc).unwrap();
        assert_eq!(parsed, ct);
        assert_eq!(canonical_ciphertext(&parsed), doc);

        let add = toy_elgamal_add();
        let ct2 = match &add {
            Keypair::ElGamal(kp) => kp.public.encrypt_with_nonce(&big(4), &big(3)).unwrap(),
            _ => unreachable!(),
        };
        let doc2 = canonical_ciphertext(&ct2);
        assert!(doc2.contains("\"c2\":\"1\""));
        assert_eq!(parse_ciphertext(&doc2).unwrap(), ct2);
    }

    #[test]
    fn ciphertext_document_rejections() {
        let fp = "0123456789abcdef0123456789abcdef";
        // c2 forbidden outside the ElGamal variants
        assert!(parse_ciphertext(&format!(
            r#"{{"v":1,"scheme":"RSA","c1":"5","c2":"6","fingerprint":"{fp}"}}"#
        ))
        .is_err());
        // c2 required for them
        assert!(parse_ciphertext(&format!(
            r#"{{"v":1,"scheme":"ELGAMAL_MUL","c1":"5","fingerprint":"{fp}"}}"#
        ))
        .is_err());
        // bad fingerprint length
        assert!(parse_ciphertext(r#"{"v":1,"scheme":"RSA","c1":"5","fingerprint":"abcd"}"#)
            .is_err());
        // garbage
        assert!(matches!(
            parse_ciphertext("not json"),
            Err(CryptoError::MalformedCiphertext(_))
        ));
    }

    #[test]
    fn requests_roundtrip() {
        let kp = toy_paillier();
        let ct = match &kp {
            Keypair::Paillier(k) => k.public.encrypt_with_nonce(&big(7), &big(2)).unwrap(),
            _ => unreachable!(),
        };
        let reqs = vec![
            Request::RegisterKey { token: "tok-1".into(), key: kp.public() },
            Request::Put { token: "tok-1".into(), blob_id: "salary.jan".into(), ciphertext: ct },
            Request::Get { token: "tok-1".into(), blob_id: "salary.jan".into() },
            Request::List { token: "tok-1".into() },
            Request::Compute {
                token: "tok-1".into(),
                op: HomomorphicOp::Add,
                input_ids: vec!["a".into(), "b".into()],
                output_id: "c".into(),
            },
        ];
        for req in reqs {
            let line = write_request(&req);
            assert!(!line.contains('\n'));
            let parsed = parse_request(&line).unwrap();
            assert_eq!(parsed, req);
        }
    }

    #[test]
    fn request_rejections() {
        assert!(parse_request("garbage").is_err());
        assert!(parse_request(r#"{"v":1,"type":"NOPE","token":"t"}"#).is_err());
        assert!(parse_request(r#"{"v":1,"type":"LIST","token":""}"#).is_err());
        assert!(parse_request(r#"{"v":1,"type":"LIST"}"#).is_err());
        assert!(parse_request(r#"{"v":7,"type":"LIST","token":"t"}"#).is_err());
        assert!(parse_request(r#"{"v":1,"type":"LIST","token":"t","extra":1}"#).is_err());
        // private field smuggled into a register payload
        let err = parse_request(
            r#"{"v":1,"type":"REGISTER_KEY","token":"t","key":{"v":1,"scheme":"PAILLIER","public":{"n":"f","g":"10"},"lambda":"4"}}"#,
        )
        .unwrap_err();
        assert_eq!(err.code(), "SchemaViolation");
    }

    #[test]
    fn responses_roundtrip() {
        let kp = toy_gm();
        let ct = match &kp {
            Keypair::Gm(k) => k.public.encrypt_bit_with_nonce(1, &big(2)).unwrap(),
            _ => unreachable!(),
        };
        let doc = canonical_ciphertext(&ct);
        let resps = vec![
            Response::Ok(OkPayload::default()),
            Response::Ok(OkPayload {
                fingerprint: Some(kp.fingerprint()),
                ..OkPayload::default()
            }),
            Response::Ok(OkPayload { ciphertext_json: Some(doc), ..OkPayload::default() }),
            Response::Ok(OkPayload {
                blobs: Some(vec![BlobSummary {
                    blob_id: "a.1".into(),
                    scheme: SchemeId::Gm,
                    created_at: "2026-01-01T00:00:00.000Z".into(),
                }]),
                ..OkPayload::default()
            }),
            Response::Ok(OkPayload { output_id: Some("out".into()), ..OkPayload::default() }),
            Response::Error { code: "UnknownBlob".into(), detail: "no blob \"x\"".into() },
        ];
        for resp in resps {
            let line = write_response(&resp);
            assert!(!line.contains('\n'));
            let parsed = parse_response(&line).unwrap();
            assert_eq!(parsed, resp);
        }
    }

    #[test]
    fn get_response_preserves_canonical_ciphertext_bytes() {
        let kp = toy_elgamal_add();
        let ct = match &kp {
            Keypair::ElGamal(k) => k.public.encrypt_with_nonce(&big(4), &big(3)).unwrap(),
            _ => unreachable!(),
        };
        let doc = canonical_ciphertext(&ct);
        let line = write_response(&Response::Ok(OkPayload {
            ciphertext_json: Some(doc.clone()),
            ..OkPayload::default()
        }));
        match parse_response(&line).unwrap() {
            Response::Ok(p) => assert_eq!(p.ciphertext_json.unwrap(), doc),
            other => panic!("unexpected response {other:?}"),
        }
    }
}
