use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use tokio::sync::OnceCell;

use faircrop_core::saliency::compute_saliency;
use faircrop_core::{ImageBuffer, Point, SaliencyMap};

use crate::{ApiError, ServiceConfig};

pub struct Session {
    image: Arc<ImageBuffer>,
    saliency: OnceCell<Arc<SaliencyMap>>,
    selection: Mutex<Option<Point>>,
    created_at: Instant,
    /// `None` never expires.
    expires_at: Option<Instant>,
}

impl Session {
    pub fn image(&self) -> &Arc<ImageBuffer> {
        &self.image
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.image.width(), self.image.height())
    }

    pub fn created_at(&self) -> Instant {
        self.created_at
    }

    pub fn selection(&self) -> Option<Point> {
        *self.selection.lock().expect("selection lock")
    }

    pub fn set_selection(&self, p: Point) {
        *self.selection.lock().expect("selection lock") = Some(p);
    }

    /// The map, computed on first use. Concurrent first callers share one
    /// computation.
    pub async fn saliency(&self, config: &ServiceConfig) -> Result<Arc<SaliencyMap>, ApiError> {
        let map = self
            .saliency
            .get_or_try_init(|| async {
                let image = self.image.clone();
                let backend = config.backend.clone();
                let step = config.params.grid_step;
                let map = tokio::task::spawn_blocking(move || compute_saliency(&image, &backend, step))
                    .await
                    .map_err(ApiError::internal)??;
                Ok::<_, ApiError>(Arc::new(map))
            })
            .await?;
        Ok(map.clone())
    }

    pub fn saliency_computed(&self) -> bool {
        self.saliency.initialized()
    }

    fn expired(&self, now: Instant) -> bool {
        self.expires_at.is_some_and(|t| now >= t)
    }
}

/// In-memory sessions keyed by image id.
#[derive(Clone)]
pub struct SessionStore {
    ttl: Duration,
    inner: Arc<RwLock<HashMap<String, Arc<Session>>>>,
}

impl SessionStore {
    pub fn new(ttl: Duration) -> Self {
        SessionStore {
            ttl,
            inner: Arc::default(),
        }
    }

    /// Store under a fresh random id, expiring after the TTL.
    pub fn insert(&self, image: ImageBuffer) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let now = Instant::now();
        self.put(id.clone(), image, Some(now + self.ttl));
        self.evict_expired();
        id
    }

    /// Store under a caller-chosen id with no expiry; replaces any existing session.
    pub fn insert_pinned(&self, id: impl Into<String>, image: ImageBuffer) {
        self.put(id.into(), image, None);
    }

    fn put(&self, id: String, image: ImageBuffer, expires_at: Option<Instant>) {
        let session = Session {
            image: Arc::new(image),
            saliency: OnceCell::new(),
            selection: Mutex::new(None),
            created_at: Instant::now(),
            expires_at,
        };
        self.inner.write().expect("session lock").insert(id, Arc::new(session));
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        let guard = self.inner.read().expect("session lock");
        match guard.get(id) {
            Some(s) if !s.expired(Instant::now()) => Ok(s.clone()),
            _ => Err(ApiError::NotFound(format!("no image {id:?}"))),
        }
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("session lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drop expired sessions; returns how many went.
    pub fn evict_expired(&self) -> usize {
        let now = Instant::now();
        let mut guard = self.inner.write().expect("session lock");
        let before = guard.len();
        guard.retain(|_, s| !s.expired(now));
        before - guard.len()
    }
}
