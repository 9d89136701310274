import init, { density_report, scenario_report, spreading_heatmap }
  from "../pkg/opident_wasm.js";

const $ = (id) => document.getElementById(id);
const fmt = (x, digits = 6) =>
  x === null || x === undefined ? "—" : Number(x).toPrecision(digits);

// ----- panel 1: density ----------------------------------------------------

const genInputs = [];
function buildGenInputs() {
  const span = $("gen-inputs");
  const names = ["a1", "b1", "c1", "d1", "a2", "b2", "c2", "d2"];
  for (const n of names) {
    const label = document.createElement("label");
    label.textContent = n;
    const input = document.createElement("input");
    input.type = "number";
    input.step = "0.25";
    input.value = "0";
    input.style.width = "4.2rem";
    label.appendChild(input);
    span.appendChild(label);
    genInputs.push(input);
  }
}

function applyPreset() {
  const v = $("preset").value;
  if (v === "custom") return;
  v.split(",").forEach((x, i) => (genInputs[i].value = x));
  runDensity();
}

function runDensity() {
  const entries = new Float64Array(genInputs.map((i) => Number(i.value)));
  const r = JSON.parse(density_report(entries));
  const out = $("density-out");
  if (r.error) {
    out.innerHTML = `<p class="no">${r.error}</p>`;
    return;
  }
  const verdict = r.necessary_condition
    ? '<span class="ok">D₂ ≤ √2 — identifiability not excluded</span>'
    : '<span class="no">D₂ > √2 — not identifiable (necessary condition fails)</span>';
  out.innerHTML = `
    <table>
      <tr><th>rank</th><td>${r.rank}</td></tr>
      <tr><th>D₂(Λ)</th><td>${fmt(r.d2, 10)}</td></tr>
      <tr><th>|det Λ̃|</th><td>${fmt(r.det_tilde)}</td></tr>
      <tr><th>D(Λ̃)</th><td>${fmt(r.d_tilde)}</td></tr>
    </table>
    <p>${verdict}</p>`;
}

// ----- panel 2: scenarios --------------------------------------------------

function runScenario() {
  const kind = $("scenario").value;
  const len = Number($("sc-len").value);
  const p1 = Number($("sc-p1").value);
  const p2 = Number($("sc-p2").value);
  const out = $("scenario-out");
  out.innerHTML = "<p class='hint'>running…</p>";
  setTimeout(() => {
    const r = JSON.parse(scenario_report(kind, len, p1, p2));
    if (r.error) {
      out.innerHTML = `<p class="no">${r.error}</p>`;
      return;
    }
    if (kind === "thm51") {
      const rep = r.report;
      out.innerHTML = `
        <table>
          <tr><th>max |A − I|</th><td>${fmt(r.max_dev_from_identity, 3)}</td></tr>
          <tr><th>spreading Riesz bounds</th>
              <td>(${fmt(rep.riesz_spreading_lo)}, ${fmt(rep.riesz_spreading_hi)})</td></tr>
          <tr><th>response Riesz bounds</th>
              <td>(${fmt(rep.riesz_response_lo)}, ${fmt(rep.riesz_response_hi)})</td></tr>
          <tr><th>cond(A)</th><td>${fmt(rep.cond_a)}</td></tr>
          <tr><th>recovery error</th><td>${fmt(rep.recovery_rel_error, 3)}</td></tr>
        </table>
        <p class="${r.max_dev_from_identity < 1e-10 ? "ok" : "no"}">
          identification matrix ${r.max_dev_from_identity < 1e-10 ? "is" : "is NOT"} the identity
        </p>`;
      return;
    }
    const rec = r.record; // CSV fields are flattened into the record object
    const rows = (r.per_identifier ?? [])
      .map(
        (p) => `<tr><td>${p.name}</td><td>${fmt(p.response_lo, 3)}</td>
                <td>${fmt(p.response_hi, 3)}</td><td>${fmt(p.sigma_ratio, 3)}</td></tr>`
      )
      .join("");
    const flag = rec.identifiable
      ? '<span class="ok">identifiable (by catalog)</span>'
      : '<span class="no">not identifiable (by catalog)</span>';
    out.innerHTML = `
      <p>D₂ = ${fmt(rec.D2)}, spreading lower bound ${fmt(rec.riesz_spreading_lo, 3)},
         ${r.record.n_points} lattice points
         (${r.record.closed ? "closed subgroup" : "truncated box"}) — ${flag}</p>
      <table>
        <tr><th>identifier</th><th>resp. lower</th><th>resp. upper</th><th>σ ratio</th></tr>
        ${rows}
      </table>
      <p class="hint">${r.record.notes}</p>`;
  }, 10);
}

// ----- panel 3: heatmap ----------------------------------------------------

const HM_LEN = 128;
function drawHeatmap() {
  const kind = $("hm-kind").value;
  const px = spreading_heatmap(
    kind,
    HM_LEN,
    Number($("hm-s").value),
    Number($("hm-w").value),
    Number($("hm-z").value),
    Number($("hm-y").value)
  );
  const canvas = $("hm-canvas");
  const ctx = canvas.getContext("2d");
  const img = new ImageData(new Uint8ClampedArray(px), HM_LEN, HM_LEN);
  ctx.putImageData(img, 0, 0);
}

// ----- wiring ----------------------------------------------------------------

await init();
buildGenInputs();
$("preset").addEventListener("change", applyPreset);
$("density-run").addEventListener("click", runDensity);
$("scenario-run").addEventListener("click", runScenario);
$("scenario").addEventListener("change", () => {
  const kind = $("scenario").value;
  $("p1-label").firstChild.textContent = kind === "thm51" ? "a " : "α ";
  $("sc-p1").value = kind === "thm51" ? 4 : 2;
  $("sc-p2").value = kind === "notident" ? 0.25 : 2;
});
for (const id of ["hm-kind", "hm-s", "hm-w", "hm-z", "hm-y"]) {
  $(id).addEventListener("input", drawHeatmap);
}
applyPreset();
drawHeatmap();
