//! File formats: NFMB channel tensors with a JSON sidecar, the estimates
//! CSV, and atomic writes for every output file.
//!
//! NFMB layout (little-endian): `b"NFMB"`, `u32` version, `u32` M, N, P, Q,
//! then `MN x PQ` entries row-major as interleaved `f64` real/imag pairs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::channel::{ChannelTensor, Dims, TensorMeta};
use crate::error::{Error, Result};
use crate::estimator::DetectedPath;
use crate::geometry::Vec3;

pub const TENSOR_MAGIC: &[u8; 4] = b"NFMB";
pub const TENSOR_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 5;

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so a failed run never leaves a partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Format(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(res?)
}

pub fn encode_tensor(dims: Dims, data: &[Complex64]) -> Result<Vec<u8>> {
    if data.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} entries for dimensions {dims:?}",
            data.len()
        )));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * data.len());
    out.extend_from_slice(TENSOR_MAGIC);
    out.extend_from_slice(&TENSOR_VERSION.to_le_bytes());
    for d in [dims.m, dims.n, dims.p, dims.q] {
        let v = u32::try_from(d).map_err(|_| Error::Format(format!("dimension {d} exceeds u32")))?;
        out.extend_from_slice(&v.to_le_bytes());
    }
    for z in data {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_tensor(bytes: &[u8]) -> Result<(Dims, Vec<Complex64>)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format("tensor file shorter than its header".into()));
    }
    if &bytes[..4] != TENSOR_MAGIC {
        return Err(Error::Format("bad magic, not an NFMB tensor".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap());
    let version = word(0);
    if version != TENSOR_VERSION {
        return Err(Error::Format(format!("unsupported tensor version {version}")));
    }
    let dims = Dims {
        m: word(1) as usize,
        n: word(2) as usize,
        p: word(3) as usize,
        q: word(4) as usize,
    };
    let body = &bytes[HEADER_LEN..];
    if body.len() != 16 * dims.len() {
        return Err(Error::Format(format!(
            "tensor body holds {} bytes, header implies {}",
            body.len(),
            16 * dims.len()
        )));
    }
    let data = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok((dims, data))
}

/// Sidecar path for a tensor file: `<file>.json`.
pub fn sidecar_path(tensor: &Path) -> PathBuf {
    let mut s = tensor.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn save_tensor(tensor: &ChannelTensor, path: &Path) -> Result<()> {
    tensor.validate()?;
    let bytes = encode_tensor(tensor.dims, &tensor.data)?;
    let mut meta = serde_json::to_string_pretty(&tensor.meta).map_err(|e| Error::Format(e.to_string()))?;
    meta.push('\n');
    write_atomic(path, &bytes)?;
    write_atomic(&sidecar_path(path), meta.as_bytes())
}

pub fn load_tensor(path: &Path) -> Result<ChannelTensor> {
    let bytes = fs::read(path)?;
    let (dims, data) = decode_tensor(&bytes)?;
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side)?;
    let meta: TensorMeta =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", side.display())))?;
    let tensor = ChannelTensor { dims, data, meta };
    tensor.validate()?;
    Ok(tensor)
}

pub const ESTIMATE_COLUMNS: [&str; 12] = [
    "path_id",
    "bounce",
    "x_m",
    "y_m",
    "z_m",
    "x2_m",
    "y2_m",
    "z2_m",
    "amp_re",
    "amp_im",
    "velocity_mps",
    "energy",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Estimates as CSV, one row per path; the second vertex is blank for
/// one-bounce paths.
pub fn estimates_to_csv(paths: &[DetectedPath]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(ESTIMATE_COLUMNS).map_err(csv_err)?;
    for (id, p) in paths.iter().enumerate() {
        if p.positions.is_empty() || p.positions.len() > 2 {
            return Err(Error::Format(format!("path {id} has {} vertices", p.positions.len())));
        }
        let mut row = vec![id.to_string(), p.order.to_string()];
        for k in 0..2 {
            match p.positions.get(k) {
                Some(v) => row.extend(v.to_array().iter().map(f64::to_string)),
                None => row.extend(std::iter::repeat_n(String::new(), 3)),
            }
        }
        row.extend([
            p.amplitude.re.to_string(),
            p.amplitude.im.to_string(),
            p.velocity.to_string(),
            p.energy.to_string(),
        ]);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

/// Parses an estimates CSV. Errors name the offending row (1-based, header
/// is row 1).
pub fn estimates_from_csv(text: &str) -> Result<Vec<DetectedPath>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(ESTIMATE_COLUMNS) {
        return Err(Error::Parse(format!("estimates header must be {}", ESTIMATE_COLUMNS.join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse(format!("estimates row {row}: {e}")))?;
        let num = |c: usize| -> Result<f64> {
            rec[c]
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("estimates row {row}: bad {} value {:?}", ESTIMATE_COLUMNS[c], &rec[c])))
        };
        let order: usize = rec[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("estimates row {row}: bad bounce value {:?}", &rec[1])))?;
        let mut positions = vec![Vec3::new(num(2)?, num(3)?, num(4)?)];
        match order {
            1 => {}
            2 => positions.push(Vec3::new(num(5)?, num(6)?, num(7)?)),
            _ => return Err(Error::Parse(format!("estimates row {row}: bounce must be 1 or 2"))),
        }
        let amplitude = Complex64::new(num(8)?, num(9)?);
        let energy = num(11)?;
        out.push(DetectedPath {
            order,
            vertex_ids: Vec::new(),
            positions,
            coefficient: amplitude,
            amplitude,
            velocity: num(10)?,
            energy,
        });
    }
    Ok(out)
}

pub fn save_estimates(paths: &[DetectedPath], path: &Path) -> Result<()> {
    write_atomic(path, &estimates_to_csv(paths)?)
}

pub fn load_estimates(path: &Path) -> Result<Vec<DetectedPath>> {
    estimates_from_csv(&fs::read_to_string(path)?)
}
