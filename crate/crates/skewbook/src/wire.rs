//! JSON wire formats.
//!
//! Complex matrices travel as row-major nested arrays of `[re, im]`
//! pairs. Channel models serialize either explicitly (`u_t`, `u_r`,
//! `var`) or through one of the convenience constructors (`iid`,
//! `separable`, `virtual`); codesets and codebooks carry their members the
//! same way. All numbers round-trip exactly through `serde_json`'s
//! shortest-representation float printing.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{dft_matrix, CanonicalModel};
use crate::codebook::{Codebook, Provenance};
use crate::error::{Error, Result};
use crate::grassmann::{Codeset, Subspace};
use crate::numerics::{haar_semiunitary, CMat};
use crate::rng::rng_from_seed;

/// Row-major `[re, im]` pairs for a complex matrix.
pub fn cmat_to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

/// Rebuilds a complex matrix from row-major `[re, im]` pairs.
pub fn cmat_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMat> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    if nr == 0 || nc == 0 {
        return Err(Error::InvalidInput("matrix: empty row data".into()));
    }
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::InvalidInput("matrix: ragged rows".into()));
    }
    Ok(CMat::from_fn(nr, nc, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

fn rmat_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn rmat_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    if nr == 0 || nc == 0 {
        return Err(Error::InvalidInput("matrix: empty row data".into()));
    }
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::InvalidInput("matrix: ragged rows".into()));
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

/// Eigenbasis choice for models that only pin the eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BasisConfig {
    #[default]
    Dft,
    Identity,
    /// Haar-random bases drawn from the given seed (transmit first).
    Haar {
        seed: u64,
    },
}

impl BasisConfig {
    fn build(&self, n_t: usize, n_r: usize) -> Result<(CMat, CMat)> {
        Ok(match self {
            BasisConfig::Dft => (dft_matrix(n_t), dft_matrix(n_r)),
            BasisConfig::Identity => (CMat::identity(n_t, n_t), CMat::identity(n_r, n_r)),
            BasisConfig::Haar { seed } => {
                let mut rng = rng_from_seed(*seed);
                let u_t = haar_semiunitary(&mut rng, n_t, n_t)?;
                let u_r = haar_semiunitary(&mut rng, n_r, n_r)?;
                (u_t, u_r)
            }
        })
    }
}

/// Serializable channel-model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelConfig {
    Iid {
        n_r: usize,
        n_t: usize,
    },
    Separable {
        lambda_t: Vec<f64>,
        lambda_r: Vec<f64>,
        #[serde(default)]
        bases: BasisConfig,
    },
    Virtual {
        var: Vec<Vec<f64>>,
    },
    Explicit {
        u_t: Vec<Vec<[f64; 2]>>,
        u_r: Vec<Vec<[f64; 2]>>,
        var: Vec<Vec<f64>>,
    },
}

impl ModelConfig {
    pub fn build(&self) -> Result<CanonicalModel> {
        match self {
            ModelConfig::Iid { n_r, n_t } => CanonicalModel::iid(*n_r, *n_t),
            ModelConfig::Separable {
                lambda_t,
                lambda_r,
                bases,
            } => {
                let (u_t, u_r) = bases.build(lambda_t.len(), lambda_r.len())?;
                CanonicalModel::separable(lambda_t, lambda_r, u_t, u_r)
            }
            ModelConfig::Virtual { var } => CanonicalModel::virtual_model(rmat_from_rows(var)?),
            ModelConfig::Explicit { u_t, u_r, var } => CanonicalModel::new(
                cmat_from_rows(u_t)?,
                cmat_from_rows(u_r)?,
                rmat_from_rows(var)?,
            ),
        }
    }

    /// The explicit form of a constructed model.
    pub fn explicit(model: &CanonicalModel) -> Self {
        ModelConfig::Explicit {
            u_t: cmat_to_rows(model.u_t()),
            u_r: cmat_to_rows(model.u_r()),
            var: rmat_to_rows(model.var()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CodesetWire {
    n_t: usize,
    m: usize,
    theta: f64,
    gamma: f64,
    members: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Serializes a codeset to its JSON wire form.
pub fn codeset_to_json(cs: &Codeset) -> String {
    let wire = CodesetWire {
        n_t: cs.members[0].n(),
        m: cs.members[0].m(),
        theta: cs.theta,
        gamma: cs.gamma,
        members: cs
            .members
            .iter()
            .map(|s| cmat_to_rows(s.matrix()))
            .collect(),
    };
    serde_json::to_string_pretty(&wire).expect("codeset serialization cannot fail")
}

/// Parses and validates a codeset from JSON.
pub fn codeset_from_json(text: &str) -> Result<Codeset> {
    let wire: CodesetWire = serde_json::from_str(text)?;
    if wire.members.is_empty() {
        return Err(Error::InvalidInput("codeset: no members".into()));
    }
    let members: Vec<Subspace> = wire
        .members
        .iter()
        .map(|rows| Subspace::new(cmat_from_rows(rows)?))
        .collect::<Result<_>>()?;
    if members.iter().any(|s| s.n() != wire.n_t || s.m() != wire.m) {
        return Err(Error::InvalidInput("codeset: member shape mismatch".into()));
    }
    Ok(Codeset {
        members,
        theta: wire.theta,
        gamma: wire.gamma,
    })
}

#[derive(Serialize, Deserialize)]
struct CodewordWire {
    tag: String,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct CodebookWire {
    b: u32,
    power: Vec<f64>,
    codewords: Vec<CodewordWire>,
}

/// Serializes a codebook to its JSON wire form.
pub fn codebook_to_json(cb: &Codebook) -> String {
    let wire = CodebookWire {
        b: cb.b,
        power: cb.power.clone(),
        codewords: cb
            .codewords
            .iter()
            .zip(cb.provenance.iter())
            .map(|(cw, pv)| CodewordWire {
                tag: pv.label(),
                matrix: cmat_to_rows(cw.matrix()),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&wire).expect("codebook serialization cannot fail")
}

/// Parses and validates a codebook from JSON.
pub fn codebook_from_json(text: &str) -> Result<Codebook> {
    let wire: CodebookWire = serde_json::from_str(text)?;
    let mut codewords = Vec::with_capacity(wire.codewords.len());
    let mut provenance = Vec::with_capacity(wire.codewords.len());
    for cw in &wire.codewords {
        codewords.push(Subspace::new(cmat_from_rows(&cw.matrix)?)?);
        provenance.push(Provenance::parse(&cw.tag)?);
    }
    if codewords.is_empty() {
        return Err(Error::InvalidInput("codebook: no codewords".into()));
    }
    let m = codewords[0].m();
    if wire.power.len() != m {
        return Err(Error::InvalidInput(
            "codebook: power length does not match the stream count".into(),
        ));
    }
    let total: f64 = wire.power.iter().sum();
    if total > m as f64 + 1e-9 || wire.power.iter().any(|p| *p < 0.0) {
        return Err(Error::InvalidInput(
            "codebook: power allocation violates the budget".into(),
        ));
    }
    Ok(Codebook {
        b: wire.b,
        codewords,
        provenance,
        power: wire.power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::make_root_codeset;
    use crate::linkperf::PowerPolicy;
    use crate::rng::rng_from_seed;

    #[test]
    fn model_config_round_trip() {
        let cfg = ModelConfig::Separable {
            lambda_t: vec![14.98, 0.50, 0.26, 0.26],
            lambda_r: vec![15.5, 0.25, 0.15, 0.10],
            bases: BasisConfig::Dft,
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("separable"));
        let back: ModelConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        let model = back.build().unwrap();
        assert!((model.channel_power() - 16.0).abs() < 1e-9);

        // explicit round trip preserves every entry
        let explicit = ModelConfig::explicit(&model);
        let again = explicit.build().unwrap();
        assert_eq!(model.u_t(), again.u_t());
        assert_eq!(model.var(), again.var());
    }

    #[test]
    fn model_config_constructors_parse() {
        let m: ModelConfig = serde_json::from_str(r#"{"iid": {"n_r": 4, "n_t": 4}}"#).unwrap();
        assert_eq!(m.build().unwrap().n_t(), 4);
        let m: ModelConfig =
            serde_json::from_str(r#"{"virtual": {"var": [[1.0, 2.0], [0.5, 0.1]]}}"#).unwrap();
        let built = m.build().unwrap();
        assert_eq!((built.n_r(), built.n_t()), (2, 2));
    }

    #[test]
    fn codeset_round_trip() {
        let cs = make_root_codeset(&mut rng_from_seed(61), 4, 2, 4, 0.8, 100).unwrap();
        let text = codeset_to_json(&cs);
        let back = codeset_from_json(&text).unwrap();
        assert_eq!(back.members.len(), cs.members.len());
        assert_eq!(back.gamma, cs.gamma);
        for (a, b) in cs.members.iter().zip(back.members.iter()) {
            assert_eq!(a.matrix(), b.matrix());
        }
    }

    #[test]
    fn codebook_round_trip() {
        let model = CanonicalModel::separable(
            &[14.98, 0.50, 0.26, 0.26],
            &[15.5, 0.25, 0.15, 0.10],
            dft_matrix(4),
            dft_matrix(4),
        )
        .unwrap();
        let root = make_root_codeset(&mut rng_from_seed(62), 4, 2, 4, 0.8, 200).unwrap();
        let cb = crate::codebook::build_codebook(
            &model,
            2,
            2,
            0.6,
            &root,
            PowerPolicy::Uniform,
            10.0,
            &mut rng_from_seed(63),
        )
        .unwrap();
        let text = codebook_to_json(&cb);
        let back = codebook_from_json(&text).unwrap();
        assert_eq!(back.b, cb.b);
        assert_eq!(back.power, cb.power);
        assert_eq!(back.provenance, cb.provenance);
        for (a, b) in cb.codewords.iter().zip(back.codewords.iter()) {
            assert_eq!(a.matrix(), b.matrix());
        }
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(cmat_from_rows(&[]).is_err());
        assert!(cmat_from_rows(&[vec![[1.0, 0.0]], vec![]]).is_err());
        assert!(codeset_from_json("{}").is_err());
        // a non-semiunitary member fails validation
        let bad = r#"{"n_t":2,"m":1,"theta":0.5,"gamma":0.1,
                      "members":[[[[2.0,0.0]],[[0.0,0.0]]]]}"#;
        assert!(codeset_from_json(bad).is_err());
    }
}
