//! JSON document schemas for topologies, through flows, and simulator
//! configurations, with conversions into the core types. Field units are
//! explicit in the names (`_bps`, `_bytes`, `_pps`); internal computation is
//! bits and seconds.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::envelope::{GaussEnvelope, HtssEnvelope};
use crate::error::{Error, Result};
use crate::network::{MuPolicy, PathSpec, ThroughFlow};
use crate::service::{CrossTraffic, LinkSpec, Packetizer};
use crate::sim::{SourceSpec, TandemConfig};
use crate::trace::PacketTrace;

/// Envelope parameter document `{kind, r_bps, H, alpha, K, b?}` plus the
/// `pareto` convenience kind. `alpha = 2` with a `b` field denotes a
/// Gaussian-tail envelope.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvelopeDoc {
    Htss {
        r_bps: f64,
        #[serde(rename = "H")]
        hurst: f64,
        alpha: f64,
        #[serde(rename = "K")]
        k: f64,
    },
    Gauss {
        r_bps: f64,
        #[serde(rename = "H")]
        hurst: f64,
        b: f64,
        #[serde(rename = "K", default = "default_gauss_k")]
        k: f64,
    },
    Pareto {
        /// Packet rate; alternatively give the data rate.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda_pps: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rate_mbps: Option<f64>,
        b_bytes: f64,
        alpha: f64,
    },
}

fn default_gauss_k() -> f64 {
    0.5
}

impl EnvelopeDoc {
    pub fn to_through_flow(&self) -> Result<ThroughFlow<f64>> {
        Ok(match self {
            EnvelopeDoc::Htss { r_bps, hurst, alpha, k } => {
                ThroughFlow::Htss(HtssEnvelope::new(*r_bps, *hurst, *alpha, *k)?)
            }
            EnvelopeDoc::Gauss { r_bps, hurst, b, k } => {
                ThroughFlow::Gauss(GaussEnvelope::new(*r_bps, *hurst, *b, *k)?)
            }
            EnvelopeDoc::Pareto { lambda_pps, rate_mbps, b_bytes, alpha } => {
                let min_packet = b_bytes * 8.0;
                let lambda = match (lambda_pps, rate_mbps) {
                    (Some(l), _) => *l,
                    (None, Some(r)) => {
                        let mean = min_packet * alpha / (alpha - 1.0);
                        r * 1e6 / mean
                    }
                    (None, None) => {
                        return Err(Error::InvalidArgument(
                            "pareto through flow needs lambda_pps or rate_mbps".into(),
                        ))
                    }
                };
                ThroughFlow::Pareto { lambda_packets: lambda, min_packet, alpha: *alpha }
            }
        })
    }
}

/// Cross-traffic parameters at one node; `alpha = 2` routes to the
/// Gaussian-tail envelope and then requires `b`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossDoc {
    pub r_bps: f64,
    #[serde(rename = "H")]
    pub hurst: f64,
    pub alpha: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

impl CrossDoc {
    pub fn to_cross(&self) -> Result<CrossTraffic<f64>> {
        if self.alpha == 2.0 {
            let b = self.b.ok_or_else(|| {
                Error::InvalidArgument("alpha = 2 marks a Gaussian tail and needs b".into())
            })?;
            Ok(CrossTraffic::Gauss(GaussEnvelope::new(self.r_bps, self.hurst, b, self.k)?))
        } else {
            Ok(CrossTraffic::Htss(HtssEnvelope::new(self.r_bps, self.hurst, self.alpha, self.k)?))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PacketizerDoc {
    pub alpha_p: f64,
    pub b_bytes: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeDoc {
    #[serde(rename = "C_bps")]
    pub c_bps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross: Option<CrossDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packetizer: Option<PacketizerDoc>,
}

impl NodeDoc {
    pub fn to_link(&self) -> Result<LinkSpec<f64>> {
        let mut link = LinkSpec::new(self.c_bps)?;
        if let Some(cross) = &self.cross {
            link = link.with_cross(cross.to_cross()?);
        }
        if let Some(p) = &self.packetizer {
            link = link.with_packetizer(Packetizer::pareto(p.alpha_p, p.b_bytes * 8.0, p.rho)?);
        }
        Ok(link)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuPolicyDoc {
    Fraction(f64),
    Explicit(Vec<f64>),
}

impl Default for MuPolicyDoc {
    fn default() -> Self {
        MuPolicyDoc::Fraction(1.0 / 3.0)
    }
}

/// Topology document for a tandem path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologyDoc {
    pub nodes: Vec<NodeDoc>,
    pub through: EnvelopeDoc,
    #[serde(rename = "muPolicy", default)]
    pub mu_policy: MuPolicyDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl TopologyDoc {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("topology json: {e}")))
    }

    pub fn to_path_spec(&self) -> Result<PathSpec<f64>> {
        let nodes: Vec<LinkSpec<f64>> =
            self.nodes.iter().map(|n| n.to_link()).collect::<Result<_>>()?;
        let mu_policy = match &self.mu_policy {
            MuPolicyDoc::Fraction(f) => MuPolicy::Fraction(*f),
            MuPolicyDoc::Explicit(v) => MuPolicy::Explicit(v.clone()),
        };
        Ok(PathSpec { nodes, through: self.through.to_through_flow()?, mu_policy, gamma: self.gamma })
    }
}

/// Packet source document for the simulator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceDoc {
    Pareto {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda_pps: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rate_mbps: Option<f64>,
        b_bytes: f64,
        alpha: f64,
    },
    Trace {
        path: String,
    },
}

impl SourceDoc {
    pub fn to_source(&self) -> Result<SourceSpec> {
        Ok(match self {
            SourceDoc::Pareto { lambda_pps, rate_mbps, b_bytes, alpha } => {
                let lambda = match (lambda_pps, rate_mbps) {
                    (Some(l), _) => *l,
                    (None, Some(r)) => {
                        let mean_bits = b_bytes * 8.0 * alpha / (alpha - 1.0);
                        r * 1e6 / mean_bits
                    }
                    (None, None) => {
                        return Err(Error::InvalidArgument(
                            "pareto source needs lambda_pps or rate_mbps".into(),
                        ))
                    }
                };
                SourceSpec::Pareto {
                    lambda_pps: lambda,
                    min_packet_bytes: *b_bytes,
                    alpha: *alpha,
                }
            }
            SourceDoc::Trace { path } => {
                SourceSpec::Replay(PacketTrace::read_csv(Path::new(path))?)
            }
        })
    }
}

/// Simulator configuration document (shares the topology vocabulary).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfigDoc {
    pub nodes: usize,
    #[serde(rename = "C_bps")]
    pub c_bps: f64,
    pub source: SourceDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross: Option<Vec<Option<SourceDoc>>>,
    #[serde(default)]
    pub warmup_packets: usize,
    #[serde(default)]
    pub record_backlog: bool,
}

impl SimConfigDoc {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("sim config json: {e}")))
    }

    pub fn to_config(&self, seed: u64) -> Result<TandemConfig> {
        let mut cfg = TandemConfig::new(self.nodes, self.c_bps, self.source.to_source()?, seed);
        if let Some(cross) = &self.cross {
            cfg.cross = cross
                .iter()
                .map(|c| c.as_ref().map(|d| d.to_source()).transpose())
                .collect::<Result<_>>()?;
        }
        cfg.warmup_packets = self.warmup_packets;
        cfg.record_backlog = self.record_backlog;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topology_roundtrip_and_conversion() {
        let json = r#"{
            "nodes": [
                {"C_bps": 100e6,
                 "cross": {"r_bps": 50e6, "H": 0.8, "alpha": 1.6, "K": 1.0},
                 "packetizer": {"alpha_p": 1.6, "b_bytes": 150, "rho": 0.75}},
                {"C_bps": 100e6}
            ],
            "through": {"kind": "pareto", "rate_mbps": 75, "b_bytes": 150, "alpha": 1.6},
            "muPolicy": {"fraction": 0.3333333333333333}
        }"#;
        let doc: TopologyDoc = serde_json::from_str(json).unwrap();
        let spec = doc.to_path_spec().unwrap();
        assert_eq!(spec.nodes.len(), 2);
        assert!(spec.nodes[0].cross.is_some());
        assert!(spec.nodes[0].packetizer.is_some());
        assert!(spec.nodes[1].cross.is_none());
        match &spec.through {
            ThroughFlow::Pareto { lambda_packets, min_packet, .. } => {
                assert!((lambda_packets - 23437.5).abs() < 1e-6);
                assert_eq!(*min_packet, 1200.0);
            }
            other => panic!("wrong through flow {other:?}"),
        }
        // serialization round-trip preserves the document
        let text = serde_json::to_string(&doc).unwrap();
        let back: TopologyDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.nodes.len(), 2);
    }

    #[test]
    fn gaussian_cross_marker() {
        let doc = CrossDoc { r_bps: 1e6, hurst: 0.5, alpha: 2.0, k: 0.5, b: Some(2e5) };
        match doc.to_cross().unwrap() {
            CrossTraffic::Gauss(g) => assert_eq!(g.scale, 2e5),
            _ => panic!("alpha = 2 must map to the Gaussian envelope"),
        }
        let missing = CrossDoc { r_bps: 1e6, hurst: 0.5, alpha: 2.0, k: 0.5, b: None };
        assert!(missing.to_cross().is_err());
    }

    #[test]
    fn sim_config_conversion() {
        let json = r#"{
            "nodes": 2,
            "C_bps": 100e6,
            "source": {"kind": "pareto", "rate_mbps": 75, "b_bytes": 150, "alpha": 1.6},
            "warmup_packets": 100
        }"#;
        let doc: SimConfigDoc = serde_json::from_str(json).unwrap();
        let cfg = doc.to_config(7).unwrap();
        assert_eq!(cfg.nodes, 2);
        assert_eq!(cfg.warmup_packets, 100);
        assert_eq!(cfg.seed, 7);
    }
}
