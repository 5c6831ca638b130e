use serde::{Deserialize, Serialize};

/// One protocol event. `ts` is a logical clock local to the log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub ts: u64,
    pub actor: String,
    pub event: String,
    pub detail: String,
}

/// Append-only event log, exported as JSON lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLog {
    events: Vec<Event>,
}

impl EventLog {
    pub fn append(&mut self, actor: &str, event: &str, detail: impl Into<String>) -> u64 {
        let ts = self.events.len() as u64;
        self.events.push(Event {
            ts,
            actor: actor.to_string(),
            event: event.to_string(),
            detail: detail.into(),
        });
        ts
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_has_one_object_per_line() {
        let mut log = EventLog::default();
        log.append("vfs.store", "stored", "voter=1 seq=1");
        log.append("vfs.forward", "verification_response", "token=00");
        let text = log.to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let e: Event = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(e.ts, 1);
        assert_eq!(e.actor, "vfs.forward");
        let v: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["actor", "detail", "event", "ts"]);
    }
}
