//! MNIST IDX container decoding (big-endian header, one byte per pixel/label).

use std::path::Path;

use crate::data::Dataset;
use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const IMAGE_SIDE: usize = 28;
pub const IMAGE_PIXELS: usize = IMAGE_SIDE * IMAGE_SIDE;

/// Decoded images (row-major, pixels scaled to [0, 1]) with their labels.
#[derive(Clone, Debug, PartialEq)]
pub struct MnistImages {
    pub pixels: Vec<f64>,
    pub labels: Vec<u8>,
    pub rows: usize,
    pub cols: usize,
}

impl MnistImages {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn image(&self, i: usize) -> &[f64] {
        let n = self.rows * self.cols;
        &self.pixels[i * n..(i + 1) * n]
    }
}

struct Header<'a> {
    dims: Vec<usize>,
    body: &'a [u8],
}

fn parse_header<'a>(bytes: &'a [u8], magic: u32, n_dims: usize, path: &Path) -> Result<Header<'a>> {
    let truncated = |what: &str| Error::IdxTruncated {
        path: path.to_path_buf(),
        what: what.to_string(),
    };
    let word = |i: usize| -> Result<u32> {
        bytes
            .get(4 * i..4 * i + 4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
            .ok_or_else(|| truncated("header"))
    };
    let found = word(0)?;
    if found != magic {
        return Err(Error::IdxMagic {
            expected: magic,
            found,
        });
    }
    let dims = (1..=n_dims)
        .map(|i| word(i).map(|d| d as usize))
        .collect::<Result<Vec<_>>>()?;
    let body = &bytes[4 * (n_dims + 1)..];
    let expected: usize = dims.iter().product();
    if body.len() < expected {
        return Err(truncated(&format!(
            "expected {expected} data bytes, found {}",
            body.len()
        )));
    }
    Ok(Header { dims, body })
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Open {
        path: path.to_path_buf(),
        source,
    })
}

/// Decode images and labels from parsed IDX byte buffers, keeping the first
/// `limit` items.
pub fn decode_mnist(
    image_bytes: &[u8],
    label_bytes: &[u8],
    limit: usize,
    images_path: &Path,
    labels_path: &Path,
) -> Result<MnistImages> {
    let img = parse_header(image_bytes, IMAGE_MAGIC, 3, images_path)?;
    let lab = parse_header(label_bytes, LABEL_MAGIC, 1, labels_path)?;
    let (count, rows, cols) = (img.dims[0], img.dims[1], img.dims[2]);
    if count != lab.dims[0] {
        return Err(Error::IdxCountMismatch {
            images: count,
            labels: lab.dims[0],
        });
    }
    let take = limit.min(count);
    let pixels = img.body[..take * rows * cols]
        .iter()
        .map(|&p| f64::from(p) / 255.0)
        .collect();
    Ok(MnistImages {
        pixels,
        labels: lab.body[..take].to_vec(),
        rows,
        cols,
    })
}

pub fn load_mnist_idx(images_path: &Path, labels_path: &Path, limit: usize) -> Result<MnistImages> {
    let image_bytes = read(images_path)?;
    let label_bytes = read(labels_path)?;
    decode_mnist(&image_bytes, &label_bytes, limit, images_path, labels_path)
}

/// One-vs-rest task: target +1 for `digit`, -1 otherwise; features named
/// `px0`, `px1`, ...
pub fn binary_task(images: &MnistImages, digit: u8) -> Result<Dataset> {
    if digit > 9 {
        return Err(Error::InvalidConfig(format!(
            "digit must be 0..9, got {digit}"
        )));
    }
    let names = (0..images.rows * images.cols)
        .map(|p| format!("px{p}"))
        .collect();
    let target = images
        .labels
        .iter()
        .map(|&l| if l == digit { 1.0 } else { -1.0 })
        .collect();
    Dataset::from_flat(images.pixels.clone(), target, names)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn idx_images(images: &[Vec<u8>], side: usize) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
        b.extend_from_slice(&(images.len() as u32).to_be_bytes());
        b.extend_from_slice(&(side as u32).to_be_bytes());
        b.extend_from_slice(&(side as u32).to_be_bytes());
        for img in images {
            b.extend_from_slice(img);
        }
        b
    }

    pub(crate) fn idx_labels(labels: &[u8]) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
        b.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        b.extend_from_slice(labels);
        b
    }

    fn p() -> &'static Path {
        Path::new("mem")
    }

    #[test]
    fn decodes_and_scales() {
        let imgs = vec![vec![0u8; IMAGE_PIXELS], vec![255u8; IMAGE_PIXELS]];
        let m = decode_mnist(&idx_images(&imgs, 28), &idx_labels(&[3, 5]), 500, p(), p()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!((m.rows, m.cols), (28, 28));
        assert!(m.image(0).iter().all(|&v| v == 0.0));
        assert!(m.image(1).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn limit_truncates() {
        let imgs = vec![vec![7u8; IMAGE_PIXELS]; 4];
        let m = decode_mnist(
            &idx_images(&imgs, 28),
            &idx_labels(&[1, 2, 3, 4]),
            2,
            p(),
            p(),
        )
        .unwrap();
        assert_eq!(m.labels, vec![1, 2]);
        assert_eq!(m.pixels.len(), 2 * IMAGE_PIXELS);
    }

    #[test]
    fn header_errors() {
        let imgs = vec![vec![0u8; IMAGE_PIXELS]];
        let mut bad = idx_images(&imgs, 28);
        bad[3] = 0x02;
        let err = decode_mnist(&bad, &idx_labels(&[0]), 1, p(), p()).unwrap_err();
        assert!(err.to_string().contains("unexpected IDX magic"));

        let full = idx_images(&imgs, 28);
        let err =
            decode_mnist(&full[..full.len() - 1], &idx_labels(&[0]), 1, p(), p()).unwrap_err();
        assert!(matches!(err, Error::IdxTruncated { .. }));
        let err = decode_mnist(&full[..6], &idx_labels(&[0]), 1, p(), p()).unwrap_err();
        assert!(matches!(err, Error::IdxTruncated { .. }));

        let err = decode_mnist(&full, &idx_labels(&[0, 1]), 1, p(), p()).unwrap_err();
        assert!(matches!(
            err,
            Error::IdxCountMismatch {
                images: 1,
                labels: 2
            }
        ));
    }

    #[test]
    fn full_size_header_is_accepted() {
        // 60000 x 28 x 28 header with the matching body size.
        let mut b = Vec::with_capacity(16 + 60_000 * IMAGE_PIXELS);
        b.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
        for d in [60_000u32, 28, 28] {
            b.extend_from_slice(&d.to_be_bytes());
        }
        b.resize(16 + 60_000 * IMAGE_PIXELS, 0);
        let labels = idx_labels(&vec![0u8; 60_000]);
        let m = decode_mnist(&b, &labels, 10, p(), p()).unwrap();
        assert_eq!(m.len(), 10);
        assert_eq!(m.image(9).len(), IMAGE_PIXELS);
    }

    #[test]
    fn binary_targets() {
        let imgs = vec![vec![0u8; IMAGE_PIXELS]; 3];
        let m = decode_mnist(&idx_images(&imgs, 28), &idx_labels(&[3, 5, 3]), 3, p(), p()).unwrap();
        let d = binary_task(&m, 3).unwrap();
        assert_eq!(d.target(), &[1.0, -1.0, 1.0]);
        assert_eq!(d.names()[0], "px0");
        assert_eq!(d.names()[783], "px783");
        let d = binary_task(&m, 9).unwrap();
        assert!(d.target().iter().all(|&t| t == -1.0));
        assert!(binary_task(&m, 10).is_err());
    }
}
