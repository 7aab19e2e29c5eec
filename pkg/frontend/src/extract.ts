/**
 * Self-contained script evaluated inside the page. It walks the DOM in
 * document order and reports, per element: tag, whitelisted attributes,
 * bounding client rect, computed-style visibility (display/visibility/
 * opacity), and per text node the rects of its whitespace-split words
 * measured via ranges (fragments with empty rects are dropped). After the
 * walk it runs a point test at each element's rect center; centers outside
 * the viewport record no hit. <iframe> subtrees stay childless: the Same
 * Origin Policy blocks their contents anyway.
 *
 * Must stay dependency-free and serializable: it is shipped to the browser
 * through Runtime.evaluate as source text.
 */

export const EXTRACTION_SCRIPT = `(() => {
  var WHITELIST = ['class', 'id', 'label', 'for', 'alt', 'title', 'type'];
  var SKIP = { script: 1, style: 1, noscript: 1, template: 1, head: 1, meta: 1, link: 1, base: 1 };
  var nodes = [];
  var idOf = new Map();
  var nextId = 0;
  var vw = window.innerWidth;
  var vh = window.innerHeight;

  function isVisible(el) {
    var cs = window.getComputedStyle(el);
    if (cs.display === 'none' || cs.visibility === 'hidden') return false;
    var opacity = parseFloat(cs.opacity);
    return !(opacity <= 0);
  }

  function rectArray(r) {
    return [r.left, r.top, r.right, r.bottom];
  }

  function visitText(textNode, parentId, parentVisible) {
    var content = textNode.textContent || '';
    if (!/\\S/.test(content)) return;
    var range = document.createRange();
    var words = [];
    var re = /\\S+/g;
    var m;
    while ((m = re.exec(content)) !== null) {
      range.setStart(textNode, m.index);
      range.setEnd(textNode, m.index + m[0].length);
      var r = range.getBoundingClientRect();
      if (r.width > 0 && r.height > 0) {
        words.push({ text: m[0], rect: rectArray(r) });
      }
    }
    if (!words.length) return;
    var x0 = Infinity, y0 = Infinity, x1 = -Infinity, y1 = -Infinity;
    for (var i = 0; i < words.length; i++) {
      var b = words[i].rect;
      if (b[0] < x0) x0 = b[0];
      if (b[1] < y0) y0 = b[1];
      if (b[2] > x1) x1 = b[2];
      if (b[3] > y1) y1 = b[3];
    }
    nodes.push({
      id: nextId++, parentId: parentId, tag: '#text', isText: true,
      attributes: {}, rect: [x0, y0, x1, y1], cssVisible: parentVisible,
      hitId: null, words: words
    });
  }

  function visit(el, parentId) {
    var id = nextId++;
    idOf.set(el, id);
    var tag = el.tagName.toLowerCase();
    var attrs = {};
    for (var i = 0; i < WHITELIST.length; i++) {
      var v = el.getAttribute(WHITELIST[i]);
      if (v !== null) attrs[WHITELIST[i]] = v;
    }
    var visible = isVisible(el);
    nodes.push({
      id: id, parentId: parentId, tag: tag, isText: false, attributes: attrs,
      rect: rectArray(el.getBoundingClientRect()), cssVisible: visible,
      hitId: null, words: []
    });
    if (tag === 'iframe') return;
    for (var child = el.firstChild; child; child = child.nextSibling) {
      if (child.nodeType === 1) {
        if (SKIP[child.tagName.toLowerCase()] === 1) continue;
        visit(child, id);
      } else if (child.nodeType === 3) {
        visitText(child, id, visible);
      }
    }
  }

  visit(document.documentElement, null);

  for (var k = 0; k < nodes.length; k++) {
    var node = nodes[k];
    if (node.isText || node.rect === null) continue;
    var cx = (node.rect[0] + node.rect[2]) / 2;
    var cy = (node.rect[1] + node.rect[3]) / 2;
    if (cx < 0 || cy < 0 || cx >= vw || cy >= vh) continue;
    var hit = document.elementFromPoint(cx, cy);
    while (hit && !idOf.has(hit)) hit = hit.parentElement;
    if (hit) node.hitId = idOf.get(hit);
  }

  return JSON.stringify({ title: document.title || '', nodes: nodes });
})()`;
