//! Corpus manifests, image IO and deterministic sampling.

mod io;
mod manifest;

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::rng::DetRng;
use crate::saliency::{compute_saliency, SaliencyBackend, SaliencyMap};

pub use io::{
    decode_image, decode_image_bytes, encode_image, encode_image_bytes, sniff_format, write_atomic,
    ImageFormat,
};
pub use manifest::{
    load_manifest, load_manifest_with, parse_manifest, validate_files, CorpusManifest, LoadOptions,
    ManifestEntry, ManifestError, Subgroup, SubgroupDef, ValidationIssue,
};

/// Draw `n` member ids from `subgroup`.
///
/// With replacement every draw is `members[below(len)]`; without, a partial
/// Fisher-Yates shuffle over the member list. Both are reproducible for a
/// given seed (see [`crate::rng`]).
pub fn sample_uniform(
    subgroup: &Subgroup,
    rng_seed: u64,
    n: usize,
    with_replacement: bool,
) -> Result<Vec<String>> {
    let members = &subgroup.members;
    if members.is_empty() {
        return Err(Error::EmptySubgroup(subgroup.id.clone()));
    }
    let mut rng = DetRng::new(rng_seed);
    if with_replacement {
        return Ok((0..n)
            .map(|_| members[rng.below(members.len())].clone())
            .collect());
    }
    if n > members.len() {
        return Err(Error::InvalidParameter(format!(
            "cannot draw {n} of {} members of {:?} without replacement",
            members.len(),
            subgroup.id
        )));
    }
    let mut pool: Vec<&String> = members.iter().collect();
    for i in 0..n {
        let j = i + rng.below(pool.len() - i);
        pool.swap(i, j);
    }
    Ok(pool[..n].iter().map(|s| (*s).clone()).collect())
}

/// A manifest with its images decoded and held in memory.
#[derive(Clone, Debug)]
pub struct Corpus {
    manifest: CorpusManifest,
    images: HashMap<String, Arc<ImageBuffer>>,
}

impl Corpus {
    /// Decode every image the manifest lists.
    pub fn load(manifest: CorpusManifest) -> Result<Self> {
        let decoded: Vec<(String, Arc<ImageBuffer>)> = manifest
            .entries
            .par_iter()
            .map(|e| {
                let img = decode_image(&manifest.resolve(&e.path))?;
                Ok((e.image_id.clone(), Arc::new(img)))
            })
            .collect::<Result<_>>()?;
        Ok(Corpus {
            images: decoded.into_iter().collect(),
            manifest,
        })
    }

    /// Pair a manifest with images already in memory. Every entry needs an image.
    pub fn from_parts(manifest: CorpusManifest, images: HashMap<String, ImageBuffer>) -> Result<Self> {
        if let Some(missing) = manifest
            .entries
            .iter()
            .find(|e| !images.contains_key(&e.image_id))
        {
            return Err(Error::UnknownImage(missing.image_id.clone()));
        }
        Ok(Corpus {
            manifest,
            images: images.into_iter().map(|(k, v)| (k, Arc::new(v))).collect(),
        })
    }

    pub fn manifest(&self) -> &CorpusManifest {
        &self.manifest
    }

    pub fn image(&self, image_id: &str) -> Result<&Arc<ImageBuffer>> {
        self.images
            .get(image_id)
            .ok_or_else(|| Error::UnknownImage(image_id.to_string()))
    }

    /// Members of a declared subgroup; unknown or empty groups are errors.
    pub fn members(&self, subgroup: &str) -> Result<&[String]> {
        match self.manifest.subgroup(subgroup) {
            Some(g) if !g.members.is_empty() => Ok(&g.members),
            _ => Err(Error::EmptySubgroup(subgroup.to_string())),
        }
    }

    /// Saliency of one corpus image. With the external backend, the entry's
    /// own `saliency_path` takes precedence over the backend's path.
    pub fn saliency(&self, image_id: &str, backend: &SaliencyBackend, grid_step: u32) -> Result<SaliencyMap> {
        let img = self.image(image_id)?;
        if let SaliencyBackend::External { .. } = backend {
            if let Some(sp) = self
                .manifest
                .entry(image_id)
                .and_then(|e| e.saliency_path.as_ref())
            {
                let own = SaliencyBackend::external(self.manifest.resolve(sp));
                return compute_saliency(img, &own, grid_step);
            }
        }
        compute_saliency(img, backend, grid_step)
    }
}
