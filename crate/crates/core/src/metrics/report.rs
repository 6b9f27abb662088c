use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Which part of the scene a report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum RegionLabel {
    Tissue,
    Tool { tool_id: u32 },
}

/// Per-region quality numbers. PSNR of identical regions is `+inf`, written
/// as the string `"inf"`. No LPIPS field: it needs a learned model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    #[serde(flatten)]
    pub label: RegionLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iou: Option<f64>,
    #[serde(serialize_with = "ser_psnr", deserialize_with = "de_psnr")]
    pub psnr: f64,
    pub ssim: f64,
}

impl RegionReport {
    /// Checks the documented ranges: iou in [0,1], ssim in [-1,1], psnr not NaN.
    pub fn is_within_bounds(&self) -> bool {
        self.iou.is_none_or(|v| (0.0..=1.0).contains(&v))
            && (-1.0..=1.0).contains(&self.ssim)
            && !self.psnr.is_nan()
    }
}

fn ser_psnr<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_psnr<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }
    match Repr::deserialize(d)? {
        Repr::Num(v) => Ok(v),
        Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Repr::Text(t) => Err(serde::de::Error::custom(format!("invalid psnr {t:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inf_sentinel_round_trips() {
        let r = RegionReport {
            label: RegionLabel::Tool { tool_id: 7 },
            iou: Some(1.0),
            psnr: f64::INFINITY,
            ssim: 1.0,
        };
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"region":"tool","tool_id":7,"iou":1.0,"psnr":"inf","ssim":1.0}"#
        );
        assert_eq!(serde_json::from_str::<RegionReport>(&json).unwrap(), r);

        let t = RegionReport {
            label: RegionLabel::Tissue,
            iou: None,
            psnr: 21.5,
            ssim: 0.5,
        };
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"region":"tissue","psnr":21.5,"ssim":0.5}"#);
        assert!(t.is_within_bounds());
    }
}
