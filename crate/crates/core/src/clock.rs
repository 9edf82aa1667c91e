//! Injectable time source for the pipeline.
//!
//! [`SystemClock`] follows wall time (optionally sped up). [`SimClock`] is a
//! discrete-event clock built on tokio's paused time: it only moves when
//! every task is parked on a timer, so time advances exclusively through
//! `sleep_until` and a run is fully deterministic.

use std::future::Future;
use std::time::Duration;

use async_trait::async_trait;

#[async_trait]
pub trait Clock: Send + Sync {
    /// Milliseconds since the clock's epoch.
    fn now_ms(&self) -> u64;

    /// Resolves once `now_ms() >= deadline_ms`.
    async fn sleep_until(&self, deadline_ms: u64);

    async fn sleep_ms(&self, ms: u64) {
        let deadline = self.now_ms().saturating_add(ms);
        self.sleep_until(deadline).await;
    }
}

/// Wall-clock time scaled by `speed` (1.0 = real time).
#[derive(Debug, Clone)]
pub struct SystemClock {
    epoch: std::time::Instant,
    speed: f64,
}

impl SystemClock {
    pub fn new() -> Self {
        Self::with_speed(1.0)
    }

    /// `speed > 1` compresses virtual time: one virtual second passes in
    /// `1 / speed` real seconds.
    pub fn with_speed(speed: f64) -> Self {
        assert!(speed.is_finite() && speed > 0.0, "clock speed must be positive");
        Self {
            epoch: std::time::Instant::now(),
            speed,
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

#[async_trait]
impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        (self.epoch.elapsed().as_secs_f64() * 1000.0 * self.speed) as u64
    }

    async fn sleep_until(&self, deadline_ms: u64) {
        loop {
            let now = self.now_ms();
            if now >= deadline_ms {
                return;
            }
            let wait = (deadline_ms - now) as f64 / self.speed;
            tokio::time::sleep(Duration::from_secs_f64(wait / 1000.0)).await;
        }
    }
}

/// Simulated clock. Must be driven from a runtime with paused time, e.g.
/// via [`SimClock::run`] or `#[tokio::test(start_paused = true)]`.
#[derive(Debug, Clone)]
pub struct SimClock {
    epoch: tokio::time::Instant,
}

impl SimClock {
    pub fn new() -> Self {
        Self {
            epoch: tokio::time::Instant::now(),
        }
    }

    /// Runs `fut` to completion on a fresh single-threaded runtime with
    /// paused time.
    pub fn run<F: Future>(fut: F) -> F::Output {
        tokio::runtime::Builder::new_current_thread()
            .enable_time()
            .start_paused(true)
            .build()
            .expect("failed to build simulation runtime")
            .block_on(fut)
    }
}

impl Default for SimClock {
    fn default() -> Self {
        Self::new()
    }
}

#[async_trait]
impl Clock for SimClock {
    fn now_ms(&self) -> u64 {
        self.epoch.elapsed().as_millis() as u64
    }

    async fn sleep_until(&self, deadline_ms: u64) {
        tokio::time::sleep_until(self.epoch + Duration::from_millis(deadline_ms)).await;
    }
}
