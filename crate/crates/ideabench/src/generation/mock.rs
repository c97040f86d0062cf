//! Scripted offline endpoint. Emits deterministic, well-formed idea lists
//! shaped by the request it receives, so every pipeline runs and replays
//! without a live model. Misbehavior (short output, skipped revision step,
//! wrong group size, transient failures) is opt-in per test.

use std::sync::atomic::{AtomicUsize, Ordering};

use super::endpoint::{ChatEndpoint, ChatRequest, Role};
use super::GenError;

const ADJECTIVES: &[&str] = &[
    "Folding", "Solar", "Magnetic", "Insulated", "Stackable", "Glow", "Compact", "Modular",
    "Heated", "Silent", "Bamboo", "Gel", "Hybrid", "Pocket", "Swivel", "Vented", "Cordless",
    "Woven", "Frosted", "Rugged", "Curved", "Padded", "Sealed", "Tinted", "Brushed", "Coated",
    "Layered", "Ribbed", "Slim", "Sturdy", "Quilted", "Polished", "Netted", "Hinged", "Domed",
    "Fluted", "Banded", "Corked", "Etched", "Looped",
];

const NOUNS: &[&str] = &[
    "Mug", "Lamp", "Organizer", "Backpack", "Charger", "Planner", "Cushion", "Bottle", "Stand",
    "Hamper", "Whiteboard", "Blanket", "Tray", "Locker", "Clip", "Easel", "Kettle", "Visor",
    "Satchel", "Stool", "Divider", "Rack", "Sleeve", "Caddy", "Tumbler", "Mat", "Pouch", "Shelf",
    "Timer", "Fan", "Opener", "Hook", "Crate", "Board", "Strap", "Case", "Dock", "Basket",
    "Holder", "Bin",
];

const PURPOSES: &[&str] = &[
    "keeps late-night study sessions comfortable",
    "saves space in a cramped dorm room",
    "survives the walk between classes",
    "makes shared kitchens less chaotic",
    "keeps devices charged through long lectures",
    "turns a desk into an organized workspace",
    "makes laundry day less of a chore",
    "helps roommates split common-area clutter",
    "keeps snacks fresh on a student budget",
    "makes moving day dramatically easier",
    "quiets a noisy residence hall",
    "keeps textbooks and notes in one place",
    "brightens a windowless study corner",
    "makes early lectures easier to reach on time",
    "stretches a meal-plan budget further",
    "keeps gym gear separate from books",
];

const MATERIALS: &[&str] = &[
    "recycled aluminum", "waxed canvas", "cork", "silicone", "beechwood", "felt", "mesh",
    "rubberized nylon", "frosted acrylic", "stainless steel", "woven hemp", "molded pulp",
    "microfiber", "anodized alloy", "bent plywood", "soft-touch plastic", "terrazzo resin",
    "wool blend", "vegan leather", "pressed bamboo",
];

fn mix(parts: &[u64]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325_u64;
    for part in parts {
        for byte in part.to_le_bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    hash
}

/// Deterministic scripted endpoint for offline runs and tests.
pub struct MockEndpoint {
    seed: u64,
    calls: AtomicUsize,
    output_fraction: f64,
    skip_revision: bool,
    group_count: Option<usize>,
    fail_on_call: Option<usize>,
}

impl MockEndpoint {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            calls: AtomicUsize::new(0),
            output_fraction: 1.0,
            skip_revision: false,
            group_count: None,
            fail_on_call: None,
        }
    }

    /// Deliver only this fraction of every requested idea count.
    pub fn with_output_fraction(mut self, fraction: f64) -> Self {
        self.output_fraction = fraction;
        self
    }

    /// Emit the staged list twice unchanged instead of revising it.
    pub fn with_skipped_revision(mut self) -> Self {
        self.skip_revision = true;
        self
    }

    /// Force hybrid group selections to return this many ideas.
    pub fn with_group_count(mut self, count: usize) -> Self {
        self.group_count = Some(count);
        self
    }

    /// Fail the n-th completion call (0-based) with a provider error.
    pub fn with_failure_on_call(mut self, call: usize) -> Self {
        self.fail_on_call = Some(call);
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    /// Short paragraphs with rotating sentence shapes, so pools do not all
    /// collapse into one near-duplicate cluster under trigram embedding.
    fn idea_paragraph(&self, stream: u64, ordinal: usize) -> String {
        let h = mix(&[self.seed, stream, ordinal as u64]);
        let pick = |shift: u32, table: &[&'static str]| table[((h >> shift) % table.len() as u64) as usize];
        let a1 = pick(0, ADJECTIVES);
        let n1 = pick(8, NOUNS);
        let a2 = pick(16, ADJECTIVES).to_lowercase();
        let n2 = pick(24, NOUNS).to_lowercase();
        let purpose = pick(32, PURPOSES);
        let material = pick(40, MATERIALS);
        let variant = (h >> 48) % 1000;
        let description = match (h >> 56) % 4 {
            0 => format!("A {material} {n2} with a {a2} latch that {purpose}."),
            1 => format!("This {a2} {n2} pairs a {material} shell with hidden storage and {purpose}."),
            2 => format!("Campus-ready {n2} finished in {material}; it {purpose} without crowding a desk."),
            _ => format!("A {a2}, {material} take on the everyday {n2} that {purpose}."),
        };
        format!("{}. {a1} {n1} {variant}: {description}", ordinal + 1)
    }

    fn title(&self, stream: u64, ordinal: usize, revised: bool) -> String {
        let h = mix(&[self.seed, stream, ordinal as u64]);
        let adjective = ADJECTIVES[(h % ADJECTIVES.len() as u64) as usize];
        let noun = NOUNS[((h >> 8) % NOUNS.len() as u64) as usize];
        let variant = (h >> 24) % 1000;
        if revised {
            format!("{}. Bolder {adjective} {noun} {variant}", ordinal + 1)
        } else {
            format!("{}. {adjective} {noun} {variant}", ordinal + 1)
        }
    }

    fn deliver_count(&self, requested: usize) -> usize {
        ((requested as f64) * self.output_fraction).floor() as usize
    }

    fn chain_of_thought_response(&self, stream: u64, requested: usize) -> String {
        let n = self.deliver_count(requested);
        let mut out = String::from("Step 1 - initial list of titles:\n");
        for i in 0..n {
            out.push_str(&self.title(stream, i, false));
            out.push('\n');
        }
        out.push_str("\nStep 2 - making the list bolder and more different:\n");
        for i in 0..n {
            out.push_str(&self.title(stream, i, !self.skip_revision));
            out.push('\n');
        }
        out.push_str("\nStep 3 - final ideas with names and descriptions:\n\n");
        for i in 0..n {
            out.push_str(&self.idea_paragraph(stream, i));
            out.push_str("\n\n");
        }
        out
    }

    fn plain_response(&self, stream: u64, requested: usize, already_emitted: usize) -> String {
        let n = self.deliver_count(requested);
        let mut out = String::new();
        for i in 0..n {
            out.push_str(&self.idea_paragraph(stream, already_emitted + i));
            out.push_str("\n\n");
        }
        out
    }
}

impl ChatEndpoint for MockEndpoint {
    fn complete(&self, request: &ChatRequest) -> Result<String, GenError> {
        let call = self.calls.fetch_add(1, Ordering::SeqCst);
        if self.fail_on_call == Some(call) {
            return Err(GenError::Provider(format!("scripted failure on call {call}")));
        }

        let last_user = request
            .messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .ok_or_else(|| GenError::Input("conversation has no user message".to_string()))?;
        let first_user = request
            .messages
            .iter()
            .find(|m| m.role == Role::User)
            .expect("at least the last user message exists");

        // New conversations get a fresh stream; continuations keep the one
        // derived from their opening message plus the call that opened them.
        let continuation = request.messages.iter().filter(|m| m.role == Role::Assistant).count() > 0;
        let conversation_key = mix(
            &first_user
                .content
                .bytes()
                .map(u64::from)
                .collect::<Vec<_>>(),
        );
        let stream = if continuation {
            // Continuations must stay on their conversation's stream; the
            // first assistant turn's length identifies it without state.
            let first_assistant = request
                .messages
                .iter()
                .find(|m| m.role == Role::Assistant)
                .map(|m| m.content.len() as u64)
                .unwrap_or(0);
            mix(&[conversation_key, first_assistant])
        } else {
            mix(&[conversation_key, call as u64])
        };

        if last_user.content.contains("Follow these steps") {
            let requested = requested_count(&last_user.content).unwrap_or(100);
            return Ok(self.chain_of_thought_response(stream, requested));
        }

        if last_user.content.contains("final top") {
            let requested = requested_count(&last_user.content).unwrap_or(10);
            let n = self.group_count.unwrap_or(self.deliver_count(requested));
            let mut out = String::from("Our group selected these ideas:\n\n");
            for i in 0..n {
                out.push_str(&self.idea_paragraph(mix(&[stream, 0x67]), i));
                out.push_str("\n\n");
            }
            return Ok(out);
        }

        let requested = requested_count(&last_user.content).unwrap_or(100);
        let already = request
            .messages
            .iter()
            .filter(|m| m.role == Role::Assistant)
            .map(|m| {
                super::parser::parse_idea_list(&m.content, super::parser::ParseMode::Lenient)
                    .map(|p| p.ideas.len())
                    .unwrap_or(0)
            })
            .sum::<usize>();
        Ok(self.plain_response(stream, requested, already))
    }

    fn label(&self) -> String {
        format!("mock(seed={})", self.seed)
    }
}

/// Finds the idea count a prompt asks for: the number before the last
/// "ideas" token, preferring an explicit "top N ideas" if present.
pub fn requested_count(text: &str) -> Option<usize> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let mut last = None;
    for window in words.windows(3) {
        if let Ok(n) = window[1].parse::<usize>() {
            if window[2].starts_with("ideas") {
                if window[0] == "top" {
                    return Some(n);
                }
                last = Some(n);
            }
        }
    }
    last.or_else(|| {
        words.windows(2).rev().find_map(|w| {
            w[1].starts_with("ideas").then(|| w[0].parse().ok()).flatten()
        })
    })
}
