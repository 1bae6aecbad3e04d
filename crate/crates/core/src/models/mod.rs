//! Classifiers: majority baseline, elastic-net logistic regression, MLP.

mod logreg;
mod mfc;
mod mlp;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

pub use logreg::{logreg_objective, train_logreg, FitReport, LinearModel, LrParams};
pub use mfc::{train_mfc, BaselineModel};
pub use mlp::{mlp_vocab, train_mlp, MlpConfig, MlpModel, MlpParams, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MODEL_FORMAT_VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Mfc,
    LogReg,
    Mlp,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mfc => "mfc",
            ModelKind::LogReg => "logreg",
            ModelKind::Mlp => "mlp",
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "mfc" | "majority" => Ok(ModelKind::Mfc),
            "logreg" | "lr" => Ok(ModelKind::LogReg),
            "mlp" => Ok(ModelKind::Mlp),
            other => Err(Error::Config(format!("unknown model kind {other:?}"))),
        }
    }
}

/// Any trained classifier.
#[derive(Clone, Debug, PartialEq)]
pub enum Model<T> {
    Mfc(BaselineModel),
    LogReg(LinearModel<T>),
    Mlp(MlpModel<T>),
}

impl<T: Scalar> Model<T> {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Mfc(_) => ModelKind::Mfc,
            Model::LogReg(_) => ModelKind::LogReg,
            Model::Mlp(_) => ModelKind::Mlp,
        }
    }

    pub fn schema(&self) -> &str {
        match self {
            Model::Mfc(_) => "-",
            Model::LogReg(m) => &m.schema,
            Model::Mlp(m) => &m.schema,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("model {MODEL_FORMAT_VERSION} {} {}\n", self.kind().name(), self.schema());
        match self {
            Model::Mfc(m) => {
                let _ = writeln!(s, "majority\t{}", m.majority);
                let _ = writeln!(s, "prior\t{}", m.prior);
            }
            Model::LogReg(m) => {
                let _ = writeln!(s, "alpha\t{}", m.alpha);
                let _ = writeln!(s, "rho\t{}", m.rho);
                let _ = writeln!(s, "bias\t{}", m.bias);
                for (k, w) in &m.weights {
                    let _ = writeln!(s, "w\t{k}\t{w}");
                }
            }
            Model::Mlp(m) => {
                let _ = writeln!(s, "dims\t{}\t{}", m.embed_dim, m.hidden);
                let _ = writeln!(s, "dropout\t{}", m.dropout);
                for w in m.vocab() {
                    let _ = writeln!(s, "word\t{w}");
                }
                let row = |xs: &[T]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\t");
                let p = &m.params;
                for r in p.emb.chunks(m.embed_dim) {
                    let _ = writeln!(s, "emb\t{}", row(r));
                }
                for r in p.w1.chunks(m.embed_dim) {
                    let _ = writeln!(s, "w1\t{}", row(r));
                }
                let _ = writeln!(s, "b1\t{}", row(&p.b1));
                let _ = writeln!(s, "w2\t{}", row(&p.w2));
                let _ = writeln!(s, "b2\t{}", p.b2);
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or_default();
        let parts: Vec<&str> = header.split(' ').collect();
        if parts.len() != 4 || parts[0] != "model" {
            return Err(Error::ModelFormat(format!("bad header {header:?}")));
        }
        if parts[1] != MODEL_FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported model format version {:?} (expected {MODEL_FORMAT_VERSION})",
                parts[1]
            )));
        }
        let kind: ModelKind = parts[2]
            .parse()
            .map_err(|_| Error::ModelFormat(format!("unknown model kind {:?}", parts[2])))?;
        let schema = parts[3].to_string();
        let mut fields: Vec<(usize, &str, Vec<&str>)> = Vec::new();
        for (i, l) in lines {
            if l.is_empty() {
                continue;
            }
            let mut it = l.split('\t');
            let key = it.next().unwrap_or_default();
            fields.push((i + 1, key, it.collect()));
        }
        let num = |line: usize, s: &str| -> Result<T> {
            s.parse::<T>()
                .map_err(|_| Error::ModelFormat(format!("line {line}: bad number {s:?}")))
        };
        let single = |key: &str| -> Result<(usize, &str)> {
            let found: Vec<_> = fields.iter().filter(|(_, k, _)| *k == key).collect();
            match found.as_slice() {
                [(line, _, vals)] if vals.len() == 1 => Ok((*line, vals[0])),
                _ => Err(Error::ModelFormat(format!("expected exactly one {key:?} line"))),
            }
        };
        let model = match kind {
            ModelKind::Mfc => {
                let (l, m) = single("majority")?;
                let majority: u8 = match m {
                    "0" => 0,
                    "1" => 1,
                    _ => return Err(Error::ModelFormat(format!("line {l}: bad majority {m:?}"))),
                };
                let (l, p) = single("prior")?;
                let prior: f64 = p
                    .parse()
                    .map_err(|_| Error::ModelFormat(format!("line {l}: bad prior {p:?}")))?;
                Model::Mfc(BaselineModel { majority, prior })
            }
            ModelKind::LogReg => {
                let (l, a) = single("alpha")?;
                let alpha = num(l, a)?;
                let (l, r) = single("rho")?;
                let rho = num(l, r)?;
                let (l, b) = single("bias")?;
                let bias = num(l, b)?;
                let mut weights = BTreeMap::new();
                for (l, k, vals) in fields.iter().filter(|(_, k, _)| *k == "w") {
                    let _ = k;
                    match vals.as_slice() {
                        [name, v] => {
                            weights.insert(name.to_string(), num(*l, v)?);
                        }
                        _ => return Err(Error::ModelFormat(format!("line {l}: expected w<TAB>name<TAB>value"))),
                    }
                }
                if let Some((k, _)) = weights.iter().find(|(_, w)| !w.is_finite()) {
                    return Err(Error::ModelFormat(format!("non-finite weight for {k:?}")));
                }
                Model::LogReg(LinearModel {
                    weights,
                    bias,
                    schema,
                    alpha,
                    rho,
                })
            }
            ModelKind::Mlp => {
                let dims = fields
                    .iter()
                    .find(|(_, k, _)| *k == "dims")
                    .ok_or_else(|| Error::ModelFormat("missing dims line".into()))?;
                let parse_usize = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| Error::ModelFormat(format!("line {}: bad dimension {s:?}", dims.0)))
                };
                let (e, d) = match dims.2.as_slice() {
                    [e, d] => (parse_usize(e)?, parse_usize(d)?),
                    _ => return Err(Error::ModelFormat("dims line needs two values".into())),
                };
                let (l, dr) = single("dropout")?;
                let dropout = num(l, dr)?;
                let vocab: Vec<String> = fields
                    .iter()
                    .filter(|(_, k, _)| *k == "word")
                    .map(|(_, _, v)| v.join("\t"))
                    .collect();
                let rows = |key: &str| -> Result<Vec<T>> {
                    let mut out = Vec::new();
                    for (l, _, vals) in fields.iter().filter(|(_, k, _)| *k == key) {
                        for v in vals {
                            out.push(num(*l, v)?);
                        }
                    }
                    Ok(out)
                };
                let params = MlpParams {
                    emb: rows("emb")?,
                    w1: rows("w1")?,
                    b1: rows("b1")?,
                    w2: rows("w2")?,
                    b2: {
                        let (l, b) = single("b2")?;
                        num(l, b)?
                    },
                };
                if params.emb.len() != vocab.len() * e || params.w1.len() != d * e || params.b1.len() != d || params.w2.len() != d {
                    return Err(Error::ModelFormat("MLP parameter shapes do not match dims".into()));
                }
                let m = MlpModel::from_parts(vocab, e, d, dropout, params);
                if m.schema != schema {
                    return Err(Error::ModelFormat(format!(
                        "schema {schema:?} in header does not match vocabulary ({:?})",
                        m.schema
                    )));
                }
                Model::Mlp(m)
            }
        };
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

pub fn save_model<T: Scalar>(model: &Model<T>, path: impl AsRef<Path>) -> Result<()> {
    model.save(path)
}

pub fn load_model<T: Scalar>(path: impl AsRef<Path>) -> Result<Model<T>> {
    Model::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_round_trip() {
        let mut weights = BTreeMap::new();
        weights.insert("bow:not".to_string(), 0.1f64 + 0.2);
        weights.insert("cmp:caps_frac".to_string(), -1e-17);
        let m = Model::LogReg(LinearModel {
            weights,
            bias: -0.3,
            schema: "fs-0011".into(),
            alpha: 1e-3,
            rho: 0.5,
        });
        let text = m.to_text();
        let back = Model::<f64>::from_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn corrupted_header() {
        assert!(matches!(Model::<f64>::from_text("modle v1 logreg s\n"), Err(Error::ModelFormat(_))));
        assert!(matches!(Model::<f64>::from_text("model v2 logreg s\n"), Err(Error::ModelFormat(_))));
        assert!(Model::<f64>::from_text("").is_err());
    }

    #[test]
    fn mfc_and_mlp_round_trip() {
        let m = Model::<f32>::Mfc(train_mfc(&[1, 1, 0]).unwrap());
        assert_eq!(Model::<f32>::from_text(&m.to_text()).unwrap(), m);
        let cfg = MlpConfig {
            embed_dim: 3,
            hidden: 2,
            ..Default::default()
        };
        let mlp = Model::Mlp(MlpModel::<f64>::init(vec!["a".into(), "b".into()], &cfg));
        let text = mlp.to_text();
        assert_eq!(Model::<f64>::from_text(&text).unwrap().to_text(), text);
    }
}
